"""Frozen calibration table for program thresholds.

The feasibility thresholds of the submatrix programs are stated relative to
measured values of the basic SDP on reference instances.  The numbers below
were measured once with the shipped solver defaults (seeds 0..9) and are
versioned so downstream reports can cite which table produced them.

Dense rows, per average degree d at n = 1000 and eps^2 d = 2:
  prog_above   mean program objective / (m sqrt(d)) on uncorrupted graphs
  prog_below   same with eps^2 d = 0.5, i.e. no usable signal
  raw_out      mean SDP(centered A) / (n sqrt(d)), full support
  raw_in       mean SDP(centered A - (eps d / n) x x^T) / (n sqrt(d))

The feasibility margin Delta is anchored at the midpoint of the measured
signal and no-signal program objectives; at these sizes both sit below the
n -> infinity constant 2, so Delta is negative and only the *difference*
between the two regimes carries information.  rho pads the signal-subtracted
mean by 20% of the measured push-out separation, which kept it above the
per-seed maximum in every calibration run.

Z2 rows: mean SDP(A0) / n^2 over seeds 0..9 at n = 500.  The entry at
sigma = 0 is the pure-noise reference the margins are anchored against.
"""

from __future__ import annotations

CALIBRATION_VERSION = 2

C_S_DEFAULT = 3.0
BETA_DEFAULT = 0.02

# (d, eps^2 d - 1) -> (prog_above, prog_below, raw_out, raw_in)
DENSE_TABLE: dict[tuple[float, float], tuple[float, float, float, float]] = {
    (20.0, 1.0): (1.8149, 1.7837, 1.8459, 1.8067),
    (40.0, 1.0): (1.8325, 1.7912, 1.8583, 1.8087),
    (80.0, 1.0): (1.8086, 1.7675, 1.8338, 1.7838),
}

# sigma -> mean SDP(A0)/n^2; 0.0 is the noise-only anchor
Z2_TABLE: dict[float, float] = {
    0.0: 1.8352,
    1.2: 1.8590,
    1.5: 1.9077,
    2.0: 2.1332,
}
Z2_NULL = Z2_TABLE[0.0]


def default_alpha(d, eps) -> float:
    """Degree cutoff scale for pruning: the expected-degree upper bound."""
    return (1.0 + eps) * d


def _nearest(key, table_keys):
    return min(table_keys, key=lambda k: abs(k - key))


def dense_margins(d, delta=1.0) -> tuple[float, float]:
    """(Delta, rho) defaults for the dense program at average degree d.

    Delta puts the objective threshold halfway between the measured
    signal and no-signal program objectives; rho is the signal-subtracted
    mean plus 20% of the measured separation, both from the nearest
    calibrated degree.
    """
    keys = [k for k in DENSE_TABLE if abs(k[1] - delta) < 0.5] or list(DENSE_TABLE)
    dk = _nearest(d, [k[0] for k in keys])
    prog_above, prog_below, raw_out, raw_in = DENSE_TABLE[(dk, 1.0)]
    Delta = 0.5 * (prog_above + prog_below) - 2.0
    rho = (raw_in - 2.0) + 0.2 * (raw_out - raw_in)
    return Delta, rho


def z2_margin(sigma) -> float:
    """Delta(sigma) default: midpoint of the noise-only and nearest
    calibrated signal means, relative to 2."""
    targets = [k for k in Z2_TABLE if k > 0.0]
    sk = _nearest(float(sigma), targets)
    return 0.5 * (Z2_NULL + Z2_TABLE[sk]) - 2.0
