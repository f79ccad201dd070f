import numpy as np
import pytest

from ksrobust.adversary import corrupt_z2
from ksrobust.model import balanced_labels, sample_z2
from ksrobust.spectral import operator_norm
from ksrobust.z2 import (Z2ProgramParams, check_z2_feasibility, recover_z2,
                         solve_z2_program)


def z2_instance(n, sigma, seed):
    rng = np.random.default_rng(seed)
    labels = balanced_labels(n, rng)
    return sample_z2(n, sigma, labels, rng), rng


def test_params_validation():
    with pytest.raises(ValueError):
        Z2ProgramParams(sigma=0.0)
    with pytest.raises(ValueError):
        Z2ProgramParams(sigma=-1.0)
    with pytest.raises(ValueError):
        Z2ProgramParams(sigma=1.5, mu=0.5)


@pytest.mark.slow
def test_signal_above_threshold_is_feasible():
    for seed in (0, 1, 2):
        inst, rng = z2_instance(500, 1.5, seed)
        point, report, _ = solve_z2_program(inst.matrix,
                                            Z2ProgramParams(sigma=1.5), rng)
        assert report.feasible
        assert report.support_size == 500
        assert report.objective >= report.objective_threshold - report.objective_tol


@pytest.mark.slow
def test_subcritical_signal_is_rejected():
    # data below the spectral detection edge, judged by the sigma=1.5 program
    flags = []
    for seed in (0, 1, 2):
        inst, rng = z2_instance(500, 0.8, seed)
        _, report, _ = solve_z2_program(inst.matrix,
                                        Z2ProgramParams(sigma=1.5), rng)
        flags.append(report.feasible)
    assert sum(flags) == 0


def test_truth_is_spectrally_feasible_above_edge():
    # top eigenvalue of a spiked matrix sits near (sigma + 1/sigma) n
    for sigma in (1.5, 2.0):
        inst, _ = z2_instance(500, sigma, seed=7)
        norm = operator_norm(inst.matrix)
        assert norm / 500 <= sigma + 1.0 / sigma + 0.1
        assert norm / 500 >= 2.0 - 0.1


def test_feasibility_report_arithmetic():
    inst, rng = z2_instance(120, 1.5, seed=3)
    params = Z2ProgramParams(sigma=1.5, mu=0.1, Delta=0.2)
    point, report, _ = solve_z2_program(inst.matrix, params, rng)
    n = 120
    assert report.support_size == int(np.floor(0.9 * n))
    assert report.objective_threshold == pytest.approx(2.2 * (0.9**2) * n**2)
    assert report.spectral_threshold == pytest.approx((1.5 + 1.0 / 1.5) * n)
    again = check_z2_feasibility(inst.matrix, point, params)
    assert again.feasible == report.feasible
    assert again.objective == pytest.approx(report.objective, rel=1e-12)


def test_solver_accepts_instance_or_matrix():
    inst, _ = z2_instance(80, 2.0, seed=4)
    a = recover_z2(inst, rng=np.random.default_rng(5), trials=10)
    b = recover_z2(inst.matrix, Z2ProgramParams(sigma=2.0),
                   rng=np.random.default_rng(5), trials=10)
    assert np.array_equal(a.labels, b.labels)
    assert a.overlap_sq_frac is not None
    assert b.overlap_sq_frac is None
    with pytest.raises(ValueError):
        recover_z2(inst.matrix, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        recover_z2(np.zeros((3, 4)), Z2ProgramParams(sigma=1.0))


def test_strong_signal_recovers_labels():
    inst, rng = z2_instance(300, 10.0, seed=6)
    est = recover_z2(inst, rng=rng, trials=20)
    assert est.overlap_sq_frac >= 0.9
    assert est.feasibility is not None
    assert not est.low_confidence


def test_recovery_survives_anti_signal_rows():
    rng = np.random.default_rng(8)
    labels = balanced_labels(400, rng)
    inst = sample_z2(400, 2.0, labels, rng)
    corrupted, record = corrupt_z2(inst, "anti-signal", 0.05, rng)
    est = recover_z2(corrupted, params=Z2ProgramParams(sigma=2.0, mu=0.05),
                     rng=rng, trials=30, labels=labels)
    assert est.overlap_sq_frac >= 0.3
    assert est.diagnostics["support_size"] == int(np.floor(0.95 * 400))


def test_decomposition_identity_and_entry_bound():
    rng = np.random.default_rng(9)
    n = 200
    labels = balanced_labels(n, rng)
    inst = sample_z2(n, 2.0, labels, rng)
    corrupted, record = corrupt_z2(inst, "anti-signal", 0.05, rng)
    params = Z2ProgramParams(sigma=2.0, mu=0.05)
    point, report, _ = solve_z2_program(corrupted.matrix, params, rng)
    X = point.factor @ point.factor.T
    Xstar = np.outer(labels, labels).astype(np.float64)
    w = np.zeros(n)
    w[point.support] = 1.0
    s = 1.0 - record.mask(n).astype(np.float64)
    block = np.outer(w, w) * np.outer(s, s)
    total = float(np.sum(X * Xstar))
    inside = float(np.sum(X * Xstar * block))
    outside = float(np.sum(X * Xstar * (1.0 - block)))
    assert total == pytest.approx(inside + outside, rel=1e-9)
    mu_eff = 1.0 - w.sum() / n
    mu_bad = record.corrupted.size / n
    assert abs(outside) <= 4.0 * (mu_eff + mu_bad) * n**2
    assert np.max(np.abs(X)) <= 1.0 + 1e-8
    # uncorrupted-block residual equality: restricted to honest rows the
    # corrupted matrix is bitwise the clean one
    honest = np.flatnonzero(s > 0)
    ix = np.ix_(honest, honest)
    resid_corrupted = corrupted.matrix[ix] - 2.0 * Xstar[ix]
    resid_clean = inst.matrix[ix] - 2.0 * Xstar[ix]
    assert np.array_equal(resid_corrupted, resid_clean)


def test_zero_out_rows_leave_support():
    rng = np.random.default_rng(10)
    labels = balanced_labels(300, rng)
    inst = sample_z2(300, 2.0, labels, rng)
    corrupted, record = corrupt_z2(inst, "zero-out", 0.1, rng)
    params = Z2ProgramParams(sigma=2.0, mu=0.1)
    point, report, _ = solve_z2_program(corrupted.matrix, params, rng)
    # zeroed rows have atypical row energy, so the initial trim drops them
    excluded = 1.0 - np.isin(record.corrupted, point.support).mean()
    assert excluded >= 0.8


def test_recover_is_deterministic():
    inst, _ = z2_instance(150, 1.8, seed=11)
    a = recover_z2(inst, rng=np.random.default_rng(3), trials=10)
    b = recover_z2(inst, rng=np.random.default_rng(3), trials=10)
    assert np.array_equal(a.labels, b.labels)
    assert a.objective == b.objective
