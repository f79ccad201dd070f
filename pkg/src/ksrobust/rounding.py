"""Hyperplane rounding of unit-row factors to +-1 label vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sdp import _Operator


@dataclass
class Estimate:
    """A label vector plus the diagnostics that produced it."""

    labels: np.ndarray
    objective: float                   # x^T M x under the selection matrix
    trials_used: int
    overlap_sq_frac: float | None = None
    feasibility: object | None = None
    low_confidence: bool = False
    diagnostics: dict = field(default_factory=dict)


def gaussian_sign_rounding(factor, trials, rng) -> list[np.ndarray]:
    """sign(V g) for iid standard Gaussian g, one label vector per trial.

    sign(0) maps to +1 so every output is exactly +-1 valued.
    """
    V = np.asarray(factor, dtype=np.float64)
    if V.ndim != 2:
        raise ValueError(f"factor must be 2-d, got shape {V.shape}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    out = []
    r = V.shape[1]
    for _ in range(trials):
        g = rng.standard_normal(r)
        x = np.where(V @ g >= 0.0, 1, -1).astype(np.int64)
        out.append(x)
    return out


def select_estimate(candidates, M) -> Estimate:
    """Pick the candidate maximizing x^T M x (first one on ties)."""
    if not candidates:
        raise ValueError("no candidates to select from")
    op = _Operator(M) if not isinstance(M, _Operator) else M
    best_idx, best_val = 0, -np.inf
    for k, x in enumerate(candidates):
        val = float(x @ op.matvec(x.astype(np.float64)))
        if val > best_val:
            best_idx, best_val = k, val
    return Estimate(
        labels=candidates[best_idx].copy(),
        objective=best_val,
        trials_used=len(candidates),
    )


def overlap_sq_frac(estimate_labels, true_labels) -> float:
    """<x_hat, x*>^2 / n^2, the squared normalized alignment."""
    x = np.asarray(estimate_labels, dtype=np.float64)
    y = np.asarray(true_labels, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"label shape mismatch: {x.shape} vs {y.shape}")
    n = x.size
    return float(x @ y) ** 2 / float(n) ** 2
