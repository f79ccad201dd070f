"""Instance generation for the two-community block model and Z2 synchronization.

Graphs are stored as sorted edge arrays; the centered adjacency matrix is
never materialized (a matvec against it costs O(m + n)).  All sampling goes
through numpy Generators so that a seed pins the instance bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SbmParams:
    """Parameters of the balanced two-community model.

    A pair {i, j} is joined with probability (1 + eps * x_i * x_j) * d / n.
    """

    n: int
    d: float
    eps: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must lie in [0, 1], got {self.eps}")
        if self.d <= 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if (1.0 + self.eps) * self.d / self.n > 1.0:
            raise ValueError(
                "edge probability (1+eps)*d/n exceeds 1; "
                f"n={self.n}, d={self.d}, eps={self.eps}"
            )

    @property
    def degree_margin(self):
        """eps^2 * d - 1, positive above the recovery threshold."""
        return self.eps**2 * self.d - 1.0


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices 0..n-1.

    ``edges`` is an (m, 2) int64 array with u < v per row, sorted
    lexicographically, no duplicates.
    """

    n: int
    edges: np.ndarray

    @staticmethod
    def from_edges(n, edges) -> "Graph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise ValueError("self-loops are not allowed")
            if lo.min() < 0 or hi.max() >= n:
                raise ValueError("edge endpoint out of range")
            edges = np.unique(np.column_stack([lo, hi]), axis=0)
        return Graph(n=n, edges=edges)

    @property
    def m(self):
        return self.edges.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if self.m:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    @cached_property
    def adjacency(self) -> sp.csr_array:
        """Symmetric 0/1 adjacency in CSR form."""
        if self.m == 0:
            return sp.csr_array((self.n, self.n), dtype=np.float64)
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(2 * self.m, dtype=np.float64)
        return sp.csr_array((data, (rows, cols)), shape=(self.n, self.n))

    @property
    def mean_degree(self):
        return 2.0 * self.m / self.n

    def induced_subgraph(self, keep) -> "Graph":
        """Subgraph on the given (sorted, unique) vertex list, relabeled 0..k-1."""
        keep = np.asarray(keep, dtype=np.int64)
        mask = np.zeros(self.n, dtype=bool)
        mask[keep] = True
        new_id = -np.ones(self.n, dtype=np.int64)
        new_id[keep] = np.arange(keep.size)
        if self.m:
            sel = mask[self.edges[:, 0]] & mask[self.edges[:, 1]]
            sub = new_id[self.edges[sel]]
        else:
            sub = np.empty((0, 2), dtype=np.int64)
        return Graph.from_edges(keep.size, sub)


def balanced_labels(n, rng) -> np.ndarray:
    """Uniformly random +-1 labels with floor(n/2) entries equal to +1."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    labels = -np.ones(n, dtype=np.int64)
    perm = rng.permutation(n)
    labels[perm[: n // 2]] = 1
    return labels


def _check_labels(n, labels):
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
    if not np.all(np.abs(labels) == 1):
        raise ValueError("labels must be +-1 valued")
    return labels.astype(np.int64)


def sample_sbm(params: SbmParams, labels, rng) -> Graph:
    """Draw a graph where pair {i,j} appears w.p. (1 + eps*x_i*x_j) * d/n.

    For n <= 5000 every pair gets an independent uniform draw (row by row,
    fixed order, so a seed pins the graph).  Larger n uses geometric skipping
    within the three constant-probability pair classes.
    """
    n = params.n
    labels = _check_labels(n, labels)
    p_same = (1.0 + params.eps) * params.d / n
    p_diff = (1.0 - params.eps) * params.d / n

    if n <= 5000:
        chunks = []
        for i in range(n - 1):
            js = np.arange(i + 1, n)
            p = np.where(labels[js] == labels[i], p_same, p_diff)
            hit = js[rng.random(n - 1 - i) < p]
            if hit.size:
                chunks.append(np.column_stack([np.full(hit.size, i), hit]))
        edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
        return Graph.from_edges(n, edges)

    # Geometric skipping: within each same-probability class successive kept
    # pairs are a Bernoulli process, so the gap between hits is geometric.
    plus = np.flatnonzero(labels == 1)
    minus = np.flatnonzero(labels == -1)
    chunks = []
    for verts_a, verts_b, p in (
        (plus, None, p_same),
        (minus, None, p_same),
        (plus, minus, p_diff),
    ):
        if verts_b is None:
            k = verts_a.size
            total = k * (k - 1) // 2
        else:
            total = verts_a.size * verts_b.size
        if total == 0 or p <= 0:
            continue
        idx = _bernoulli_skip_indices(total, p, rng)
        if idx.size == 0:
            continue
        if verts_b is None:
            # linear index t -> pair (a, b), a < b within the class
            a = ((1 + np.sqrt(1 + 8.0 * idx)) / 2).astype(np.int64)
            # correct float rounding at triangular boundaries
            while True:
                low = a * (a - 1) // 2
                bad = low > idx
                if not bad.any():
                    break
                a[bad] -= 1
            while True:
                high = (a + 1) * a // 2
                bad = idx >= high
                if not bad.any():
                    break
                a[bad] += 1
            b = idx - a * (a - 1) // 2
            chunks.append(np.column_stack([verts_a[b], verts_a[a]]))
        else:
            a, b = np.divmod(idx, verts_b.size)
            chunks.append(np.column_stack([verts_a[a], verts_b[b]]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, edges)


def _bernoulli_skip_indices(total, p, rng):
    """Indices of hits in `total` Bernoulli(p) trials, via geometric gaps."""
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    log1mp = np.log1p(-p)
    # draw gaps in blocks to amortize Generator overhead
    expect = max(16, int(total * p * 1.2) + 16)
    while pos < total:
        gaps = np.floor(np.log(rng.random(expect)) / log1mp).astype(np.int64) + 1
        steps = pos + np.cumsum(gaps)
        out.append(steps)
        pos = steps[-1]
    idx = np.concatenate(out)
    return idx[idx < total]


class CenteredMatrix:
    """Lazy representation of A - (d/n) * J (the all-ones matrix).

    Every entry is shifted, including the diagonal, which equals -d/n.
    Supports matvec / matmat in O(m + n) per column and restriction to a
    vertex subset (the shift d/n keeps its original value under restriction).
    """

    def __init__(self, adjacency: sp.csr_array, shift: float, n_original=None):
        self.adj = adjacency
        self.shift = float(shift)
        self.n_original = int(n_original if n_original is not None else adjacency.shape[0])

    @staticmethod
    def from_graph(graph: Graph, d) -> "CenteredMatrix":
        if d < 0:
            raise ValueError(f"d must be nonnegative, got {d}")
        return CenteredMatrix(graph.adjacency, d / graph.n, n_original=graph.n)

    @property
    def shape(self):
        return self.adj.shape

    @property
    def d(self):
        """Centering degree: shift * n of the graph the shift was built from."""
        return self.shift * self.n_original

    def matvec(self, x):
        return self.adj @ x - self.shift * x.sum()

    def matmat(self, V):
        return self.adj @ V - self.shift * V.sum(axis=0)

    def entry(self, i, j):
        return self.adj[[i], [j]][0] - self.shift

    def dense(self):
        return self.adj.toarray() - self.shift

    def submatrix(self, idx) -> "CenteredMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        sub = self.adj[idx][:, idx]
        return CenteredMatrix(sub, self.shift, n_original=self.n_original)

    def quad_form(self, x):
        return float(x @ self.matvec(x))


def center_adjacency(graph: Graph, d) -> CenteredMatrix:
    """A - (d/n)*J as a lazy operator; d = 0 just returns the adjacency view."""
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    return CenteredMatrix.from_graph(graph, d)


@dataclass(frozen=True)
class Z2Instance:
    """Observation A0 = sigma * x x^T + W with W_ij ~ N(0, n) noise."""

    n: int
    sigma: float
    matrix: np.ndarray
    labels: np.ndarray


def sample_z2(n, sigma, labels, rng) -> Z2Instance:
    """Spiked symmetric Gaussian matrix.

    Off-diagonal noise entries are iid N(0, n); diagonal entries get
    variance 2n (the symmetric-ensemble convention), so tests of the
    off-diagonal variance see exactly n.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    labels = _check_labels(n, labels)
    g = rng.standard_normal((n, n)) * np.sqrt(n)
    w = np.triu(g, 1)
    w = w + w.T
    np.fill_diagonal(w, rng.standard_normal(n) * np.sqrt(2.0 * n))
    a = sigma * np.outer(labels, labels).astype(np.float64) + w
    return Z2Instance(n=n, sigma=float(sigma), matrix=a, labels=labels)
