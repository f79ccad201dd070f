"""Shared brute-force oracles for the test suite.

Everything here is an independent reimplementation used only to check the
package: exhaustive enumeration and dense eigendecompositions instead of
iterative solvers.
"""

import numpy as np


def random_symmetric(rng, n, zero_diag=True, scale=1.0):
    """Symmetric matrix with entries uniform in [-scale, scale]."""
    M = rng.uniform(-scale, scale, size=(n, n))
    M = 0.5 * (M + M.T)
    if zero_diag:
        np.fill_diagonal(M, 0.0)
    return M


def cut_max(M):
    """Exact max of x^T M x over x in {+-1}^n by enumeration (n <= 22)."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    assert n <= 22
    total = 1 << max(0, n - 1)
    bits = np.arange(n - 1, dtype=np.uint64) if n > 1 else np.empty(0, dtype=np.uint64)
    best = -np.inf
    chunk = 1 << 14
    for start in range(0, total, chunk):
        c = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        X = np.ones((c.size, n))
        if n > 1:
            X[:, 1:] = 1.0 - 2.0 * ((c[:, None] >> bits) & 1)
        vals = np.einsum("ij,jk,ik->i", X, M, X)
        best = max(best, float(vals.max()))
    return best


def inf_to_one_exhaustive(M):
    """max x^T M y over x, y in {+-1}^n, enumerating both sides (n <= 12)."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    assert n <= 12
    best = -np.inf
    for cx in range(1 << n):
        x = 1.0 - 2.0 * ((cx >> np.arange(n)) & 1)
        row = x @ M
        for cy in range(1 << n):
            y = 1.0 - 2.0 * ((cy >> np.arange(n)) & 1)
            best = max(best, float(row @ y))
    return best


def sdp_value_cvxpy(M, solver=None):
    """Reference SDP value via an interior-point/first-order solver.

    Returns None when cvxpy is unavailable so callers can skip.
    """
    try:
        import cvxpy as cp
    except ImportError:
        return None
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    X = cp.Variable((n, n), symmetric=True)
    prob = cp.Problem(cp.Maximize(cp.trace(M @ X)), [X >> 0, cp.diag(X) == 1])
    kwargs = {"solver": solver} if solver else {}
    prob.solve(**kwargs)
    return float(prob.value)
