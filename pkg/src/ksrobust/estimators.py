"""Scikit-learn style wrappers around the recovery pipelines.

The pipelines are clustering-shaped (adjacency in, labels out), so the
wrappers follow the fit / fit_predict protocol with ``labels_`` set after
fit.  Inputs are validated as square symmetric matrices; graphs may arrive
as dense arrays or scipy sparse matrices with 0/1 entries.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin

from .dense import DenseProgramParams, recover_dense
from .model import Graph
from .sdp import SolverOptions
from .sparse import SparseParams, recover_sparse
from .z2 import Z2ProgramParams, recover_z2


def check_adjacency(X) -> Graph:
    """Validate a square symmetric 0/1 matrix and convert it to a Graph."""
    if sp.issparse(X):
        X = sp.coo_array(X)
        rows, cols, data = X.row, X.col, X.data
        n = X.shape[0]
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {X.shape}")
        if data.size and not np.all(np.isin(data, (0, 1))):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(rows == cols):
            keep = rows != cols
            rows, cols = rows[keep], cols[keep]
        mask = rows < cols
        edges = np.column_stack([rows[mask], cols[mask]])
        graph = Graph.from_edges(n, edges)
        # symmetry: every (u, v) needs its mirror
        other = np.column_stack([cols[~mask], rows[~mask]])
        mirror = Graph.from_edges(n, other) if other.size else Graph.from_edges(n, [])
        if graph.m != mirror.m or not np.array_equal(graph.edges, mirror.edges):
            raise ValueError("adjacency must be symmetric")
        return graph
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {X.shape}")
    if not np.array_equal(X, X.T):
        raise ValueError("adjacency must be symmetric")
    vals = np.unique(X)
    if not np.all(np.isin(vals, (0, 1))):
        raise ValueError("adjacency entries must be 0 or 1")
    if np.any(np.diag(X) != 0):
        raise ValueError("adjacency must have a zero diagonal")
    u, v = np.nonzero(np.triu(X, 1))
    return Graph.from_edges(X.shape[0], np.column_stack([u, v]))


def check_symmetric_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"matrix must be square, got shape {X.shape}")
    if not np.allclose(X, X.T, atol=1e-8 * (1.0 + np.abs(X).max())):
        raise ValueError("matrix must be symmetric")
    return X


class RobustCommunityCluster(ClusterMixin, BaseEstimator):
    """Two-community recovery from a (possibly corrupted) adjacency matrix.

    :param mode: "dense" (submatrix program) or "sparse" (degree pruning).
    :param d: expected average degree; None estimates it from the graph.
    :param eps: edge-bias parameter of the planted model.
    :param mu: assumed corrupted-vertex budget.
    :param trials: rounding trials.
    :param random_state: seed for all randomized stages.
    """

    def __init__(self, mode="dense", d=None, eps=0.2, mu=0.0, trials=50,
                 random_state=0):
        self.mode = mode
        self.d = d
        self.eps = eps
        self.mu = mu
        self.trials = trials
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.mode not in ("dense", "sparse"):
            raise ValueError(f"mode must be 'dense' or 'sparse', got {self.mode!r}")
        graph = check_adjacency(X)
        d = self.d if self.d is not None else max(graph.mean_degree, 1e-9)
        rng = np.random.default_rng(self.random_state)
        solver = SolverOptions(seed=int(rng.integers(2**63)))
        if self.mode == "dense":
            est = recover_dense(graph, DenseProgramParams(mu=self.mu, solver=solver),
                                d, self.eps, rng, trials=self.trials)
        else:
            est = recover_sparse(graph, SparseParams(mu=self.mu, solver=solver),
                                 d, self.eps, rng, trials=self.trials)
        self.labels_ = est.labels
        self.estimate_ = est
        self.feasible_ = None if est.feasibility is None else bool(est.feasibility.feasible)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class Z2Synchronizer(BaseEstimator):
    """Sign recovery from a spiked symmetric matrix under row corruption.

    :param sigma: signal strength of the spike.
    :param mu: assumed corrupted-row budget.
    :param trials: rounding trials.
    :param random_state: seed for all randomized stages.
    """

    def __init__(self, sigma=1.5, mu=0.0, trials=50, random_state=0):
        self.sigma = sigma
        self.mu = mu
        self.trials = trials
        self.random_state = random_state

    def fit(self, X, y=None):
        A = check_symmetric_matrix(X)
        rng = np.random.default_rng(self.random_state)
        params = Z2ProgramParams(sigma=self.sigma, mu=self.mu,
                                 solver=SolverOptions(seed=int(rng.integers(2**63))))
        est = recover_z2(A, params, rng, trials=self.trials)
        self.labels_ = est.labels
        self.estimate_ = est
        self.feasible_ = bool(est.feasibility.feasible)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
