"""Submatrix search with a push-out objective and a spectral cap.

The program asks for a support w (|w| = floor((1-mu-beta) n)) and a
unit-diagonal psd X such that

    <A_w, X>  >=  (2 + Delta) * |w| * sqrt(d)      (push-out objective)
    ||A_w||op <=  C_s * sqrt(d)                    (spectral cap)

where A_w is the centered adjacency restricted to the support.  Instead of
a relaxation over moment matrices, the solver alternates: SDP solve with w
fixed, then greedy support swaps with X fixed (evict by spectral leverage
while the cap is violated, admit by marginal objective), and reports the
best point seen with an exact feasibility check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import calibration
from .model import CenteredMatrix, Graph, center_adjacency
from .rounding import Estimate, gaussian_sign_rounding, overlap_sq_frac, select_estimate
from .sdp import SolverOptions, solve_basic_sdp, with_seed
from .spectral import operator_norm


@dataclass(frozen=True)
class DenseProgramParams:
    mu: float = 0.0
    beta: float = calibration.BETA_DEFAULT
    Delta: float | None = None          # None: calibrated default for this d
    rho: float | None = None
    C_s: float = calibration.C_S_DEFAULT
    alpha: float | None = None          # degree-prune scale; None: 1.25 * d_hat
    spectral_tol_frac: float = 0.01     # slack fraction allowed on the cap
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if not 0.0 <= self.mu < 0.5:
            raise ValueError(f"mu must lie in [0, 0.5), got {self.mu}")
        if not 0.0 <= self.beta < 0.5:
            raise ValueError(f"beta must lie in [0, 0.5), got {self.beta}")
        if self.mu + self.beta >= 1.0:
            raise ValueError("mu + beta must stay below 1")
        if self.C_s <= 0:
            raise ValueError(f"C_s must be positive, got {self.C_s}")


@dataclass
class ProgramPoint:
    """Candidate (X, w): unit-row factor for X = V V^T plus a 0/1 support."""

    factor: np.ndarray        # (n, r); rows outside the support are extensions
    support: np.ndarray       # sorted indices with w_i = 1

    def support_mask(self, n):
        w = np.zeros(n, dtype=bool)
        w[self.support] = True
        return w


@dataclass
class FeasibilityReport:
    feasible: bool
    objective: float
    objective_threshold: float
    objective_tol: float
    spectral: float
    spectral_threshold: float
    spectral_tol: float
    support_size: int
    Delta: float
    rho: float

    def as_dict(self):
        return {
            "feasible": bool(self.feasible),
            "objective": self.objective,
            "objective_threshold": self.objective_threshold,
            "objective_tol": self.objective_tol,
            "spectral": self.spectral,
            "spectral_threshold": self.spectral_threshold,
            "spectral_tol": self.spectral_tol,
            "support_size": self.support_size,
            "Delta": self.Delta,
            "rho": self.rho,
        }


def _resolved(params: DenseProgramParams, d):
    delta_fallback, rho_fallback = calibration.dense_margins(d)
    Delta = params.Delta if params.Delta is not None else delta_fallback
    rho = params.rho if params.rho is not None else rho_fallback
    return Delta, rho


def support_objective(Atil: CenteredMatrix, factor, mask) -> float:
    """Exact <A_S, V V^T> via the edge list: O(m r + n r)."""
    adj = Atil.adj
    n = adj.shape[0]
    V = factor
    Vm = np.where(mask[:, None], V, 0.0)
    edge_part = float(np.sum(Vm * (adj @ Vm)))
    col = Vm.sum(axis=0)
    return edge_part - Atil.shift * float(col @ col)


def check_feasibility(Atil: CenteredMatrix, point: ProgramPoint,
                      params: DenseProgramParams) -> FeasibilityReport:
    """Exact evaluation of both program constraints at the given point."""
    n = Atil.shape[0]
    d = Atil.d
    Delta, rho = _resolved(params, d)
    mask = point.support_mask(n)
    m_target = point.support.size
    sqrt_d = math.sqrt(d)
    obj = support_objective(Atil, point.factor, mask)
    obj_thr = (2.0 + Delta) * m_target * sqrt_d
    spec = operator_norm(Atil.submatrix(point.support)) if m_target else 0.0
    spec_thr = params.C_s * sqrt_d
    obj_tol = 1e-9 * max(1.0, abs(obj_thr))
    spec_tol = params.spectral_tol_frac * spec_thr
    feasible = obj >= obj_thr - obj_tol and spec <= spec_thr + spec_tol
    return FeasibilityReport(
        feasible=feasible,
        objective=obj,
        objective_threshold=obj_thr,
        objective_tol=obj_tol,
        spectral=spec,
        spectral_threshold=spec_thr,
        spectral_tol=spec_tol,
        support_size=m_target,
        Delta=Delta,
        rho=rho,
    )


def _extend_factor(Atil: CenteredMatrix, V_sub, support, n):
    """Full-length factor: solved rows on the support, aligned rows outside.

    A vertex outside the support gets the normalized pull of its supported
    neighborhood, so rounding still assigns it a data-driven sign.
    """
    r = V_sub.shape[1]
    V = np.zeros((n, r))
    V[support] = V_sub
    pull = Atil.adj @ V - Atil.shift * V.sum(axis=0)
    outside = np.ones(n, dtype=bool)
    outside[support] = False
    idx = np.flatnonzero(outside)
    if idx.size:
        block = pull[idx]
        norms = np.linalg.norm(block, axis=1, keepdims=True)
        ok = norms[:, 0] > 1e-12
        block = np.divide(block, norms, out=np.zeros_like(block), where=norms > 0)
        block[~ok] = 0.0
        block[~ok, 0] = 1.0
        V[idx] = block
    return V, pull


def _top_eigvec(op, n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(200):
        w = op.matvec(op.matvec(v))
        nw = np.linalg.norm(w)
        if nw == 0:
            return v
        w /= nw
        if np.linalg.norm(w - v) < 1e-6:
            return w
        v = w
    return v


def solve_program(Atil: CenteredMatrix, params: DenseProgramParams, rng):
    """Alternating maximization over (X, w).

    Returns (ProgramPoint, FeasibilityReport, SdpSolution); the report
    describes the returned point, which is the best feasible point seen, or
    the best-objective point if nothing was feasible.
    """
    n = Atil.shape[0]
    d = Atil.d
    if d <= 0:
        raise ValueError("centered matrix must carry a positive degree scale")
    m_target = int(np.floor((1.0 - params.mu - params.beta) * n))
    if m_target < 1:
        raise ValueError("support size would be empty; check mu and beta")
    sqrt_d = math.sqrt(d)
    cap = params.C_s * sqrt_d
    cap_tol = params.spectral_tol_frac * cap

    degrees = np.asarray(Atil.adj.sum(axis=1)).ravel()
    d_hat = degrees.mean() if n else 0.0
    alpha = params.alpha if params.alpha is not None else 1.25 * max(d_hat, 1.0)

    # degree-typicality score; vertices past the hard prune cutoff sort last
    atypical = np.abs(degrees - d_hat)
    hard = degrees > 20.0 * alpha
    order = np.lexsort((np.arange(n), atypical + np.where(hard, 1e18, 0.0)))
    support = np.sort(order[:m_target])

    budget = 4 * math.ceil(params.mu * n) + 20
    best = None           # (point, report, sol)
    while True:
        sub = Atil.submatrix(support)
        sol = solve_basic_sdp(sub, with_seed(params.solver, rng.integers(2**63)))
        V_full, pull = _extend_factor(Atil, sol.factor, support, n)
        point = ProgramPoint(factor=V_full, support=support.copy())
        report = check_feasibility(Atil, point, params)
        if best is None or (report.feasible, report.objective) > (
            best[1].feasible, best[1].objective
        ):
            best = (point, report, sol)
        if report.spectral <= report.spectral_threshold + report.spectral_tol:
            # no spectral violation means the swap rule fires nothing more
            break
        if budget <= 0:
            break

        # swap phase with X fixed: evict the strongest spectral offender,
        # admit the excluded vertex with the best marginal objective
        in_mask = point.support_mask(n)
        blocked = np.zeros(n, dtype=bool)
        marg_base = np.sum(V_full * pull, axis=1)
        old_support = support
        while budget > 0:
            sub_op = Atil.submatrix(support)
            if operator_norm(sub_op) <= cap + cap_tol:
                break
            u = _top_eigvec(sub_op, support.size, seed=int(rng.integers(2**63)))
            deg_sub = np.asarray(sub_op.adj.sum(axis=1)).ravel()
            row_sq = deg_sub * (1.0 - 2.0 * sub_op.shift) + support.size * sub_op.shift**2
            leverage = np.sqrt(np.maximum(row_sq, 0.0)) * np.abs(u)
            evict = int(support[int(np.argmax(leverage))])
            in_mask[evict] = False
            blocked[evict] = True
            marg = np.where(in_mask | blocked, -np.inf, marg_base)
            admit = int(np.argmax(marg))
            in_mask[admit] = True
            support = np.flatnonzero(in_mask)
            budget -= 1
        if support.size == old_support.size and np.array_equal(support, old_support):
            break

    point, report, sol = best
    return point, report, sol


def certified_correlation_bound(params: DenseProgramParams, d, eps, n) -> float:
    """Correlation guaranteed for any feasible point, in absolute units.

    ((Delta - rho) (1 - 2 mu - beta) - 2 C_s mu) * n^2 / (eps sqrt(d))
        - 2 (2 mu + beta) n^2.
    A nonpositive value means the calibrated margins certify nothing.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    Delta, rho = _resolved(params, d)
    lead = (Delta - rho) * (1.0 - 2.0 * params.mu - params.beta) - 2.0 * params.C_s * params.mu
    return lead * n**2 / (eps * math.sqrt(d)) - 2.0 * (2.0 * params.mu + params.beta) * n**2


def recover_dense(graph: Graph, params: DenseProgramParams, d, eps, rng,
                  labels=None, trials=50) -> Estimate:
    """Full pipeline: center, solve the program, round, select."""
    if params.alpha is None:
        params = dataclasses.replace(params, alpha=calibration.default_alpha(d, eps))
    Atil = center_adjacency(graph, d)
    point, report, _ = solve_program(Atil, params, rng)
    candidates = gaussian_sign_rounding(point.factor, trials, rng)
    est = select_estimate(candidates, Atil)
    est.feasibility = report
    est.low_confidence = not report.feasible
    est.diagnostics["support_size"] = int(point.support.size)
    est.diagnostics["factor"] = point.factor
    est.diagnostics["support"] = point.support
    if eps > 0:
        est.diagnostics["certified_correlation"] = certified_correlation_bound(
            params, d, eps, graph.n
        )
    if labels is not None:
        est.overlap_sq_frac = overlap_sq_frac(est.labels, labels)
    return est
