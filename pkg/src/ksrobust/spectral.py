"""Spectral-norm estimation and degree-based pruning.

Power iteration runs on M^2 (two matvecs per step) and stops once the two
Rayleigh-quotient estimates ||Mv|| and ||M^2 v|| / ||Mv|| agree to the
requested relative tolerance.  Both are lower bounds on ||M||, so agreement
certifies the estimate up to the tolerance with overwhelming probability
over the random start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Graph, center_adjacency
from .sdp import _Operator


@dataclass
class PruneResult:
    kept: np.ndarray          # sorted vertex indices surviving the cut
    removed: np.ndarray
    norm_after: float         # spectral norm of the centered kept-submatrix
    threshold: float          # the degree cutoff that was applied


def operator_norm(M, tol=1e-4, seed=0, max_iters=20000) -> float:
    """Spectral norm of a symmetric matrix or operator, within ~tol relative.

    The returned value never exceeds the true norm (it is a Rayleigh
    quotient), so callers comparing against a cap C get a one-sided check.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    op = _Operator(M) if not isinstance(M, _Operator) else M
    n = op.n
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iters):
        u = op.matvec(v)
        lower = np.linalg.norm(u)
        if lower == 0.0:
            return 0.0
        w = op.matvec(u)
        est = np.linalg.norm(w) / lower
        v = w / np.linalg.norm(w)
        if est <= (1.0 + 0.5 * tol) * lower:
            break
    return float(est)


def prune_high_degree(graph: Graph, alpha) -> PruneResult:
    """Drop every vertex whose degree exceeds 20 * alpha.

    alpha should upper-bound the expected degree, e.g. (1 + eps) * d.  The
    norm of the centered adjacency restricted to the survivors is reported;
    centering uses the observed mean degree of the input graph.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    cutoff = 20.0 * alpha
    deg = graph.degrees
    kept = np.flatnonzero(deg <= cutoff)
    removed = np.flatnonzero(deg > cutoff)
    if kept.size == 0:
        return PruneResult(kept=kept, removed=removed, norm_after=0.0, threshold=cutoff)
    centered = center_adjacency(graph, graph.mean_degree)
    norm_after = operator_norm(centered.submatrix(kept))
    return PruneResult(kept=kept, removed=removed, norm_after=norm_after, threshold=cutoff)
