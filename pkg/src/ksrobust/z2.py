"""Robust Z2 synchronization from a corrupted spiked Gaussian matrix.

Same program shape as the dense graph case: find a support w of size
floor((1-mu) n) and a unit-diagonal psd X with

    <A_w, X>  >=  (2 + Delta(sigma)) (1-mu)^2 n^2
    ||A_w||op <=  (sigma + 1/sigma) n

solved by alternating SDP steps and greedy support swaps.  The spectral cap
sits exactly at the spiked-matrix edge, so feasibility checks allow a small
configurable slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import calibration
from .dense import FeasibilityReport, ProgramPoint
from .model import Z2Instance
from .rounding import Estimate, gaussian_sign_rounding, overlap_sq_frac, select_estimate
from .sdp import SolverOptions, solve_basic_sdp, with_seed
from .spectral import operator_norm


@dataclass(frozen=True)
class Z2ProgramParams:
    sigma: float
    mu: float = 0.0
    Delta: float | None = None        # None: calibrated margin for this sigma
    spectral_slack_frac: float = 0.05
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 <= self.mu < 0.5:
            raise ValueError(f"mu must lie in [0, 0.5), got {self.mu}")


def _as_matrix(A):
    if isinstance(A, Z2Instance):
        return A.matrix
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    return A


def _support_objective(A, V, support):
    Vs = V[support]
    return float(np.sum(Vs * (A[np.ix_(support, support)] @ Vs)))


def check_z2_feasibility(A, point: ProgramPoint, params: Z2ProgramParams) -> FeasibilityReport:
    A = _as_matrix(A)
    n = A.shape[0]
    Delta = params.Delta if params.Delta is not None else calibration.z2_margin(params.sigma)
    obj = _support_objective(A, point.factor, point.support)
    obj_thr = (2.0 + Delta) * (1.0 - params.mu) ** 2 * n**2
    spec = operator_norm(A[np.ix_(point.support, point.support)])
    spec_thr = (params.sigma + 1.0 / params.sigma) * n
    obj_tol = 1e-9 * max(1.0, abs(obj_thr))
    spec_tol = params.spectral_slack_frac * spec_thr
    feasible = obj >= obj_thr - obj_tol and spec <= spec_thr + spec_tol
    return FeasibilityReport(
        feasible=feasible,
        objective=obj,
        objective_threshold=obj_thr,
        objective_tol=obj_tol,
        spectral=spec,
        spectral_threshold=spec_thr,
        spectral_tol=spec_tol,
        support_size=int(point.support.size),
        Delta=Delta,
        rho=0.0,
    )


def _extend_rows(A, V_sub, support, n):
    r = V_sub.shape[1]
    V = np.zeros((n, r))
    V[support] = V_sub
    pull = A @ V
    outside = np.ones(n, dtype=bool)
    outside[support] = False
    idx = np.flatnonzero(outside)
    if idx.size:
        block = pull[idx]
        norms = np.linalg.norm(block, axis=1, keepdims=True)
        block = np.divide(block, norms, out=np.zeros_like(block), where=norms > 1e-12)
        zero = norms[:, 0] <= 1e-12
        block[zero] = 0.0
        block[zero, 0] = 1.0
        V[idx] = block
    return V, pull


def solve_z2_program(A, params: Z2ProgramParams, rng):
    """Alternating (X, w) maximization; returns (point, report, solution)."""
    A = _as_matrix(A)
    n = A.shape[0]
    m_target = int(np.floor((1.0 - params.mu) * n))
    if m_target < 1:
        raise ValueError("support size would be empty; check mu")
    cap = (params.sigma + 1.0 / params.sigma) * n
    cap_tol = params.spectral_slack_frac * cap

    # initial support: trim rows whose energy deviates most from the median
    row_sq = np.sum(A * A, axis=1)
    dev = np.abs(row_sq - np.median(row_sq))
    order = np.lexsort((np.arange(n), dev))
    support = np.sort(order[:m_target])

    budget = 4 * int(np.ceil(params.mu * n)) + 20
    best = None
    while True:
        sol = solve_basic_sdp(
            A[np.ix_(support, support)], with_seed(params.solver, rng.integers(2**63))
        )
        V_full, pull = _extend_rows(A, sol.factor, support, n)
        point = ProgramPoint(factor=V_full, support=support.copy())
        report = check_z2_feasibility(A, point, params)
        if best is None or (report.feasible, report.objective) > (
            best[1].feasible, best[1].objective
        ):
            best = (point, report, sol)
        if report.spectral <= report.spectral_threshold + report.spectral_tol:
            break
        if budget <= 0:
            break

        in_mask = point.support_mask(n)
        blocked = np.zeros(n, dtype=bool)
        marg_base = np.sum(V_full * pull, axis=1)
        old_support = support
        while budget > 0:
            sub = A[np.ix_(support, support)]
            if operator_norm(sub) <= cap + cap_tol:
                break
            u = _power_vec(sub, rng)
            leverage = np.linalg.norm(sub, axis=1) * np.abs(u)
            evict = int(support[int(np.argmax(leverage))])
            in_mask[evict] = False
            blocked[evict] = True
            marg = np.where(in_mask | blocked, -np.inf, marg_base)
            admit = int(np.argmax(marg))
            in_mask[admit] = True
            support = np.flatnonzero(in_mask)
            budget -= 1
        if np.array_equal(support, old_support):
            break

    return best


def _power_vec(M, rng, iters=200):
    v = rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = M @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return v
        w /= nw
        if np.linalg.norm(w - v) < 1e-6:
            return w
        v = w
    return v


def recover_z2(inst, params: Z2ProgramParams | None = None, rng=None,
               labels=None, trials=50) -> Estimate:
    """Solve the program, round the factor, select by the raw quadratic form."""
    if rng is None:
        rng = np.random.default_rng(0)
    if isinstance(inst, Z2Instance):
        A = inst.matrix
        if labels is None:
            labels = inst.labels
        if params is None:
            params = Z2ProgramParams(sigma=inst.sigma)
    else:
        A = _as_matrix(inst)
        if params is None:
            raise ValueError("params required when passing a bare matrix")
    point, report, _ = solve_z2_program(A, params, rng)
    candidates = gaussian_sign_rounding(point.factor, trials, rng)
    est = select_estimate(candidates, A)
    est.feasibility = report
    est.low_confidence = not report.feasible
    est.diagnostics["support_size"] = int(point.support.size)
    if labels is not None:
        est.overlap_sq_frac = overlap_sq_frac(est.labels, labels)
    return est
