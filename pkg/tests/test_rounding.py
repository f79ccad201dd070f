import numpy as np
import pytest

from ksrobust.model import center_adjacency
from ksrobust.rounding import (gaussian_sign_rounding, overlap_sq_frac,
                               select_estimate)

from conftest import make_sbm


def aligned_factor(x, alpha, rng=None):
    """Unit-row factor with X_ij = alpha^2 x_i x_j off the diagonal."""
    n = x.size
    V = np.zeros((n, n + 1))
    V[:, 0] = alpha * x
    V[np.arange(n), np.arange(n) + 1] = np.sqrt(1.0 - alpha**2)
    return V


def test_rank_one_factor_rounds_exactly():
    rng = np.random.default_rng(0)
    x = np.where(rng.random(50) < 0.5, 1.0, -1.0)
    out = gaussian_sign_rounding(x.reshape(-1, 1), 20, rng)
    for cand in out:
        assert np.array_equal(cand, x.astype(np.int64)) or np.array_equal(
            cand, (-x).astype(np.int64)
        )
        assert overlap_sq_frac(cand, x) == 1.0


def test_identity_factor_is_chance_level():
    rng = np.random.default_rng(1)
    n = 100
    x = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    out = gaussian_sign_rounding(np.eye(n), 200, rng)
    mean_sq = np.mean([overlap_sq_frac(c, x) for c in out])
    # independent fair signs: E[overlap^2/n^2] = 1/n
    assert mean_sq <= 5.0 / n
    assert mean_sq >= 0.05 / n


def test_pairwise_sign_agreement_follows_arcsine_law():
    rng = np.random.default_rng(2)
    theta = np.pi / 3.0
    V = np.array([[1.0, 0.0], [np.cos(theta), np.sin(theta)]])
    out = gaussian_sign_rounding(V, 20000, rng)
    agree = np.mean([c[0] * c[1] for c in out])
    # E[x_1 x_2] = 1 - 2 theta / pi = 1/3
    assert agree == pytest.approx(1.0 / 3.0, abs=0.03)


def test_correlated_factor_keeps_quadratic_overlap():
    rng = np.random.default_rng(3)
    n = 100
    x = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    alpha_sq = 0.5
    V = aligned_factor(x, np.sqrt(alpha_sq))
    X = V @ V.T
    c = float(np.sum(X * np.outer(x, x))) / n**2
    theta = float(np.sum(X * np.outer(x, x))) / (np.linalg.norm(X) * n)
    out = gaussian_sign_rounding(V, 100, rng)
    mean_sq = np.mean([overlap_sq_frac(cand, x) for cand in out])
    assert mean_sq >= (2.0 * c / np.pi) ** 2 * 0.5
    assert theta >= 0.2
    assert mean_sq >= 0.1 * theta**2


def test_rounding_validation_and_determinism():
    V = np.eye(4)
    with pytest.raises(ValueError):
        gaussian_sign_rounding(V, 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        gaussian_sign_rounding(np.ones(4), 3, np.random.default_rng(0))
    a = gaussian_sign_rounding(V, 5, np.random.default_rng(7))
    b = gaussian_sign_rounding(V, 5, np.random.default_rng(7))
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert all(c.dtype == np.int64 and set(np.unique(c)) <= {-1, 1} for c in a)


def test_zero_row_rounds_to_plus_one():
    V = np.array([[1.0, 0.0], [0.0, 0.0]])
    out = gaussian_sign_rounding(V, 10, np.random.default_rng(5))
    for cand in out:
        assert cand[1] == 1


def test_global_sign_flip_equivariance():
    rng = np.random.default_rng(6)
    V = rng.standard_normal((30, 4))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    a = gaussian_sign_rounding(V, 8, np.random.default_rng(9))
    b = gaussian_sign_rounding(-V, 8, np.random.default_rng(9))
    for u, v in zip(a, b):
        assert np.array_equal(u, -v)
    x = np.where(rng.random(30) < 0.5, 1, -1)
    assert overlap_sq_frac(x, a[0]) == overlap_sq_frac(-x, a[0])
    assert overlap_sq_frac(x, a[0]) == overlap_sq_frac(x, -a[0])


def test_select_estimate_maximizes_quadratic_form():
    M = np.array([[0.0, 1.0, -1.0], [1.0, 0.0, 0.5], [-1.0, 0.5, 0.0]])
    cands = [np.array([1, 1, 1]), np.array([1, 1, -1]), np.array([-1, 1, 1])]
    est = select_estimate(cands, M)
    oracle = [float(x @ M @ x) for x in cands]
    assert est.objective == max(oracle)
    assert np.array_equal(est.labels, cands[int(np.argmax(oracle))])
    assert est.trials_used == 3


def test_select_estimate_single_and_ties():
    M = np.zeros((3, 3))
    one = select_estimate([np.array([1, -1, 1])], M)
    assert np.array_equal(one.labels, [1, -1, 1])
    same = [np.array([1, 1, 1]), np.array([1, 1, 1]), np.array([-1, -1, -1])]
    est = select_estimate(same, M)
    assert est.labels is not same[0]
    assert np.array_equal(est.labels, same[0])
    with pytest.raises(ValueError):
        select_estimate([], M)


def test_select_estimate_finds_planted_labels():
    graph, labels, rng = make_sbm(200, 20.0, 0.9, seed=8)
    centered = center_adjacency(graph, 20.0)
    random_cand = np.where(rng.random(200) < 0.5, 1, -1)
    est = select_estimate([random_cand, labels.copy()], centered)
    assert np.array_equal(est.labels, labels)


def test_overlap_sq_frac_exact_values():
    x = np.array([1, -1, 1, -1])
    assert overlap_sq_frac(x, x) == 1.0
    assert overlap_sq_frac(x, -x) == 1.0
    assert overlap_sq_frac(np.array([1, 1, -1, -1]), np.array([1, -1, 1, -1])) == 0.0
    rng = np.random.default_rng(4)
    a = np.where(rng.random(31) < 0.5, 1, -1)
    b = np.where(rng.random(31) < 0.5, 1, -1)
    assert overlap_sq_frac(a, b) == pytest.approx((a @ b) ** 2 / 31.0**2)
    with pytest.raises(ValueError):
        overlap_sq_frac(np.ones(3), np.ones(4))
