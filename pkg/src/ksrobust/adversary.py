"""Node-level corruption models.

Every strategy touches only rows/columns of a budgeted corrupted set, so
the submatrix on the untouched vertices is exactly the input.  The
corrupted set has size floor(mu * n) and is drawn uniformly; the record of
what was changed travels with the output so tests can audit it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import Graph, Z2Instance, _check_labels, balanced_labels

NODE_STRATEGIES = ("stealth-rewire", "degree-flood", "sign-flip")
Z2_STRATEGIES = ("anti-signal", "zero-out", "spike-plant")


@dataclass(frozen=True)
class CorruptionRecord:
    mu: float
    corrupted: np.ndarray       # sorted corrupted indices
    strategy: str

    @property
    def indicator(self):
        return self.corrupted

    def mask(self, n) -> np.ndarray:
        s = np.zeros(n, dtype=bool)
        s[self.corrupted] = True
        return s

    def to_json(self) -> str:
        return json.dumps(
            {
                "mu": self.mu,
                "strategy": self.strategy,
                "corrupted": [int(i) for i in self.corrupted],
            }
        )

    @staticmethod
    def from_json(text) -> "CorruptionRecord":
        obj = json.loads(text)
        return CorruptionRecord(
            mu=float(obj["mu"]),
            corrupted=np.asarray(sorted(obj["corrupted"]), dtype=np.int64),
            strategy=str(obj["strategy"]),
        )


def _pick_corrupted(n, mu, rng):
    if not 0.0 <= mu < 1.0:
        raise ValueError(f"mu must lie in [0, 1), got {mu}")
    k = int(np.floor(mu * n))
    chosen = rng.choice(n, size=k, replace=False) if k else np.empty(0, dtype=np.int64)
    return np.sort(chosen.astype(np.int64))


def corrupt_nodes(graph: Graph, labels, strategy, mu, rng):
    """Apply a node corruption and return (graph, record).

    stealth-rewire: wipe each corrupted vertex's edges, reattach Poisson(d)
        edges into the opposite community (degree stays plausible).
    degree-flood: connect each corrupted vertex to floor(n/2) random others.
    sign-flip: resample each corrupted vertex's row as if its label were
        flipped, using the edge rates estimated from the input.
    """
    if strategy not in NODE_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; options: {NODE_STRATEGIES}")
    n = graph.n
    labels = _check_labels(n, labels)
    corrupted = _pick_corrupted(n, mu, rng)
    record = CorruptionRecord(mu=float(mu), corrupted=corrupted, strategy=strategy)
    if corrupted.size == 0:
        return graph, record

    bad = record.mask(n)
    edges = graph.edges
    if edges.size:
        untouched = edges[~(bad[edges[:, 0]] | bad[edges[:, 1]])]
    else:
        untouched = edges
    d_hat = graph.mean_degree

    new_chunks = [untouched]
    if strategy == "stealth-rewire":
        for v in corrupted:
            opposite = np.flatnonzero(labels == -labels[v])
            k = min(rng.poisson(d_hat), opposite.size)
            if k:
                targets = rng.choice(opposite, size=k, replace=False)
                new_chunks.append(
                    np.column_stack([np.full(k, v, dtype=np.int64), targets])
                )
    elif strategy == "degree-flood":
        others = np.arange(n)
        k = n // 2
        for v in corrupted:
            pool = others[others != v]
            targets = rng.choice(pool, size=k, replace=False)
            new_chunks.append(np.column_stack([np.full(k, v, dtype=np.int64), targets]))
    else:  # sign-flip
        m_in, m_cross = _edge_split(graph, labels)
        m = max(1, m_in + m_cross)
        eps_hat = min(1.0, max(-1.0, (m_in - m_cross) / m))
        p_base = d_hat / n
        for v in corrupted:
            flipped = -labels[v]
            others = np.arange(n)
            others = others[others != v]
            p = (1.0 + eps_hat * flipped * labels[others]) * p_base
            np.clip(p, 0.0, 1.0, out=p)
            hit = others[rng.random(others.size) < p]
            if hit.size:
                new_chunks.append(
                    np.column_stack([np.full(hit.size, v, dtype=np.int64), hit])
                )

    new_edges = np.concatenate(new_chunks) if new_chunks else untouched
    return Graph.from_edges(n, new_edges), record


def _edge_split(graph: Graph, labels):
    if graph.m == 0:
        return 0, 0
    same = labels[graph.edges[:, 0]] == labels[graph.edges[:, 1]]
    m_in = int(same.sum())
    return m_in, graph.m - m_in


def erasure_adversary(graph: Graph, mu, rng):
    """Keep a uniform subset of ceil((1-mu) n) vertices, relabeled compactly.

    Returns (subgraph, index_map) with index_map[new] = old.  mu = 0 keeps
    every vertex (the map is the identity).
    """
    if not 0.0 <= mu < 1.0:
        raise ValueError(f"mu must lie in [0, 1), got {mu}")
    n = graph.n
    keep_count = n - int(np.floor(mu * n))
    if mu == 0.0:
        return graph, np.arange(n, dtype=np.int64)
    kept = np.sort(rng.choice(n, size=keep_count, replace=False).astype(np.int64))
    return graph.induced_subgraph(kept), kept


def corrupt_z2(inst: Z2Instance, strategy, mu, rng):
    """Corrupt floor(mu*n) rows/columns of a Z2 observation matrix.

    anti-signal: replace touched entries with -sigma * x_i x_j plus fresh noise.
    zero-out: zero all touched entries.
    spike-plant: replace touched entries with sigma * y_i y_j plus fresh
        noise for a random balanced +-1 vector y.

    The untouched principal submatrix is bitwise the input and the output
    stays exactly symmetric.
    """
    if strategy not in Z2_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; options: {Z2_STRATEGIES}")
    n = inst.n
    corrupted = _pick_corrupted(n, mu, rng)
    record = CorruptionRecord(mu=float(mu), corrupted=corrupted, strategy=strategy)
    if corrupted.size == 0:
        return Z2Instance(n, inst.sigma, inst.matrix.copy(), inst.labels), record

    if strategy == "zero-out":
        repl = np.zeros((n, n))
    else:
        g = rng.standard_normal((n, n)) * np.sqrt(n)
        noise = np.triu(g, 1)
        noise = noise + noise.T
        np.fill_diagonal(noise, rng.standard_normal(n) * np.sqrt(2.0 * n))
        if strategy == "anti-signal":
            signal = -inst.sigma * np.outer(inst.labels, inst.labels)
        else:  # spike-plant
            y = balanced_labels(n, rng)
            signal = inst.sigma * np.outer(y, y)
        repl = signal + noise

    out = inst.matrix.copy()
    out[corrupted, :] = repl[corrupted, :]
    out[:, corrupted] = repl[:, corrupted]
    return Z2Instance(n, inst.sigma, out, inst.labels), record
