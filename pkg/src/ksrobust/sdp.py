"""Diagonal-constrained SDP value via low-rank factorization.

SDP(M) = max { <M, X> : X psd, X_ii = 1 }.

The maximization runs over X = V V^T with unit-norm rows of V, projected
gradient ascent with a Barzilai-Borwein step and per-row renormalization.
Any unit-row factor is feasible, so the reported value is always a lower
bound on SDP(M) up to floating-point error; the dual certificate
provides the matching upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .model import CenteredMatrix


@dataclass(frozen=True)
class SolverOptions:
    rank: int | None = None       # None: max(8, ceil(sqrt(2n)))
    restarts: int = 5
    max_iters: int = 2000
    tol: float = 1e-9             # relative objective change over `window` iters
    window: int = 50
    seed: int = 0


@dataclass
class SdpSolution:
    value: float
    factor: np.ndarray            # (n, r), rows unit norm
    dual_gap: float
    iterations: int
    converged: bool


class _Operator:
    """Uniform matmat interface over ndarray / sparse / CenteredMatrix / composites."""

    def __init__(self, base):
        self.base = base
        if isinstance(base, np.ndarray):
            if base.ndim != 2 or base.shape[0] != base.shape[1]:
                raise ValueError(f"matrix must be square, got shape {base.shape}")
            if not np.allclose(base, base.T, atol=1e-10 * (1.0 + np.abs(base).max())):
                raise ValueError("matrix must be symmetric")
            self.shape = base.shape
        elif sp.issparse(base):
            self.shape = base.shape
        elif isinstance(base, (CenteredMatrix, LowRankUpdate, EmbeddedOperator)):
            self.shape = base.shape
        else:
            raise ValueError(f"unsupported matrix type {type(base)!r}")

    @property
    def n(self):
        return self.shape[0]

    def matmat(self, V):
        b = self.base
        if isinstance(b, np.ndarray) or sp.issparse(b):
            return b @ V
        return b.matmat(V)

    def matvec(self, x):
        b = self.base
        if isinstance(b, np.ndarray) or sp.issparse(b):
            return b @ x
        if hasattr(b, "matvec"):
            return b.matvec(x)
        return b.matmat(x.reshape(-1, 1)).ravel()

    def submatrix(self, idx):
        b = self.base
        idx = np.asarray(idx, dtype=np.int64)
        if isinstance(b, np.ndarray):
            return b[np.ix_(idx, idx)]
        if sp.issparse(b):
            return sp.csr_array(b)[idx][:, idx]
        if hasattr(b, "submatrix"):
            return b.submatrix(idx)
        raise ValueError(f"cannot restrict operator of type {type(b)!r}")


class LowRankUpdate:
    """base + coeff * u u^T without materializing the outer product."""

    def __init__(self, base, u, coeff):
        self._op = _Operator(base)
        self.u = np.asarray(u, dtype=np.float64).ravel()
        if self.u.size != self._op.n:
            raise ValueError("update vector length mismatch")
        self.coeff = float(coeff)
        self.shape = self._op.shape

    def matmat(self, V):
        return self._op.matmat(V) + self.coeff * np.outer(self.u, self.u @ V)

    def matvec(self, x):
        return self._op.matvec(x) + self.coeff * self.u * (self.u @ x)

    def submatrix(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return LowRankUpdate(self._op.submatrix(idx), self.u[idx], self.coeff)


class EmbeddedOperator:
    """Symmetrized block embedding  0.5 * [[0, M], [M^T, 0]]  of an n x n matrix."""

    def __init__(self, base):
        self._op = _Operator(base)
        n = self._op.n
        self.shape = (2 * n, 2 * n)

    def matmat(self, V):
        n = self._op.n
        top, bottom = V[:n], V[n:]
        # M is symmetric here, so M^T x = M x
        return 0.5 * np.concatenate([self._op.matmat(bottom), self._op.matmat(top)])

    def matvec(self, x):
        return self.matmat(x.reshape(-1, 1)).ravel()


def default_rank(n):
    return max(8, math.isqrt(2 * n - 1) + 1)


def _row_normalize(V, fallback=None):
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    bad = norms[:, 0] < 1e-300
    if bad.any():
        V = V.copy()
        if fallback is not None:
            V[bad] = fallback[bad]
        else:
            V[bad] = 0.0
            V[bad, 0] = 1.0
        norms = np.linalg.norm(V, axis=1, keepdims=True)
    return V / norms


def _tangent(V, G):
    # remove the radial component row-wise; rows of V are unit vectors
    lam = np.sum(V * G, axis=1, keepdims=True)
    return G - lam * V


def _ascend(op, V, opts):
    """Projected gradient ascent with BB step on f(V) = <M, V V^T>.

    The BB step is computed from the tangential gradient (radial components
    of 2 M V are killed by the row normalization and only stall the step
    estimate).
    """
    G = 2.0 * op.matmat(V)
    obj = 0.5 * float(np.sum(V * G))
    T = _tangent(V, G)
    tnorm = np.linalg.norm(T)
    step = np.linalg.norm(V) / tnorm if tnorm > 0 else 1.0
    history = [obj]
    best_obj, best_V = obj, V.copy()
    it = 0
    converged = False
    for it in range(1, opts.max_iters + 1):
        V_new = _row_normalize(V + step * T, fallback=V)
        G_new = 2.0 * op.matmat(V_new)
        obj = 0.5 * float(np.sum(V_new * G_new))
        if obj > best_obj:
            best_obj, best_V = obj, V_new.copy()
        T_new = _tangent(V_new, G_new)
        s = V_new - V
        y = T_new - T
        sy = float(np.sum(s * y))
        ss = float(np.sum(s * s))
        if sy < 0 and np.isfinite(sy):
            step = ss / (-sy)
        else:
            # landscape locally convex along s; fall back to a norm-scaled step
            tn = np.linalg.norm(T_new)
            step = np.linalg.norm(V_new) / tn if tn > 0 else 1.0
        step = min(max(step, 1e-14), 1e14)
        V, T = V_new, T_new
        history.append(obj)
        if it >= opts.window:
            prev = history[it - opts.window]
            if abs(obj - prev) <= opts.tol * max(1.0, abs(obj)):
                converged = True
                break
    return best_V, best_obj, it, converged


def solve_basic_sdp(M, opts: SolverOptions | None = None) -> SdpSolution:
    """Lower-bound maximizer of <M, X> over unit-diagonal psd X.

    Deterministic: the same options (including seed) give the same factor
    bitwise.  Restarts keep the best objective; ties keep the earliest.
    """
    opts = opts or SolverOptions()
    op = _Operator(M) if not isinstance(M, _Operator) else M
    n = op.n
    if n == 0:
        return SdpSolution(0.0, np.empty((0, 1)), 0.0, 0, True)
    r = opts.rank or default_rank(n)
    rng = np.random.default_rng(opts.seed)
    best = None
    total_iters = 0
    for _ in range(max(1, opts.restarts)):
        V0 = _row_normalize(rng.standard_normal((n, r)))
        V, obj, iters, conv = _ascend(op, V0, opts)
        total_iters += iters
        if best is None or obj > best[1]:
            best = (V, obj, conv)
    V, _, conv = best
    MV = op.matmat(V)
    value = float(np.sum(V * MV))
    sol = SdpSolution(value=value, factor=V, dual_gap=np.nan,
                      iterations=total_iters, converged=conv)
    sol.dual_gap = certify_optimality(op, sol, _mv=MV)
    return sol


def _lambda_max(op, n, seed=1, tol=1e-6, max_iters=4000):
    """Largest (signed) eigenvalue via shifted power iteration on op + cI."""
    norm = _power_norm(op, n, seed=seed, tol=tol, max_iters=max_iters)
    if norm == 0.0:
        return 0.0
    shifted = _ShiftedOp(op, norm)
    top = _power_norm(shifted, n, seed=seed + 1, tol=tol, max_iters=max_iters)
    return top - norm


class _ShiftedOp:
    def __init__(self, op, c):
        self.op = op
        self.c = c

    def matvec(self, x):
        return self.op.matvec(x) + self.c * x


def _power_norm(op, n, seed=0, tol=1e-6, max_iters=4000):
    """Spectral norm estimate: power iteration on M^2 with Rayleigh stopping."""
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
        upper = np.linalg.norm(w) / lower
        v = w / np.linalg.norm(w)
        if upper <= (1.0 + 0.5 * tol) * max(lower, 1e-300):
            return upper
        est = upper
    return est


def certify_optimality(M, sol: SdpSolution, _mv=None) -> float:
    """Duality gap bound n*max(0, lmax(M - Diag(lam))) + sum(lam) - value.

    lam_i = (M X)_ii read off the factor.  The bound is valid for any
    unit-diagonal psd X, so a small gap certifies near-optimality.
    """
    op = M if isinstance(M, _Operator) else _Operator(M)
    V = sol.factor
    n = op.n
    if n == 0:
        return 0.0
    MV = op.matmat(V) if _mv is None else _mv
    lam = np.sum(V * MV, axis=1)
    shifted = _DiagShifted(op, lam)
    lmax = _lambda_max(shifted, n)
    gap = n * max(0.0, lmax) + float(lam.sum()) - sol.value
    # weak duality makes the true gap nonnegative; cancellation in
    # sum(lam) - value can float a hair below zero at exact optima
    return max(0.0, gap)


class _DiagShifted:
    """M - Diag(lam) as an operator."""

    def __init__(self, op, lam):
        self.op = op
        self.lam = lam

    def matvec(self, x):
        return self.op.matvec(x) - self.lam * x


def grothendieck_norm(M, opts: SolverOptions | None = None) -> SdpSolution:
    """max <M, X_offdiag-block> over the 2n x 2n unit-diagonal psd embedding.

    Writes the bilinear relaxation as the basic SDP of
    0.5*[[0, M], [M^T, 0]]; for symmetric M the optimum dominates SDP(M)
    (take both blocks equal) and is at most the Krivine constant times the
    infinity-to-one norm.
    """
    embed = EmbeddedOperator(M)
    return solve_basic_sdp(embed, opts)


def inf_to_one_norm_bruteforce(M) -> float:
    """Exact max of x^T M y over x, y in {+-1}^n by enumerating x.

    For each x the optimal y is coordinate-wise sign(M^T x), so only
    2^(n-1) sign vectors are visited (global sign symmetry).  Refuses
    n > 22.
    """
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if n > 22:
        raise ValueError(f"enumeration capped at n = 22, got {n}")
    if n == 0:
        return 0.0
    best = -np.inf
    total = 1 << max(0, n - 1)
    chunk = 1 << 14
    codes = np.arange(total, dtype=np.uint64)
    bits = np.arange(n - 1, dtype=np.uint64) if n > 1 else np.empty(0, dtype=np.uint64)
    for start in range(0, total, chunk):
        c = codes[start : start + chunk]
        # x_0 fixed to +1; remaining coordinates from the binary code
        X = np.ones((c.size, n))
        if n > 1:
            X[:, 1:] = 1.0 - 2.0 * ((c[:, None] >> bits) & 1)
        vals = np.abs(X @ M).sum(axis=1)
        best = max(best, float(vals.max()))
    return best


def sdp_submatrix(M, subset, opts: SolverOptions | None = None) -> SdpSolution:
    """Basic SDP value of the principal submatrix on `subset`."""
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size == 0:
        return SdpSolution(0.0, np.empty((0, 1)), 0.0, 0, True)
    op = _Operator(M) if not isinstance(M, _Operator) else M
    if np.unique(subset).size != subset.size:
        raise ValueError("subset contains duplicate indices")
    if subset.min() < 0 or subset.max() >= op.n:
        raise ValueError("subset index out of range")
    return solve_basic_sdp(op.submatrix(subset), opts)


def with_seed(opts: SolverOptions | None, seed) -> SolverOptions:
    """Copy of the options with a replaced seed (handy for derived solves)."""
    return replace(opts or SolverOptions(), seed=int(seed))
