import numpy as np
import pytest

from dirfdr.errors import DimensionError
from dirfdr.model import Design, Response, normalize_columns
from dirfdr.screening import (ScreenResult, lasso_screen,
                              marginal_prescreen, random_rotation,
                              rotate_then_split, split_rows)


def _data(seed, n=80, p=12, strong=(2, 7), amp=4.0, noise=0.3):
    rng = np.random.default_rng(seed)
    X = normalize_columns(Design.from_matrix(rng.standard_normal((n, p))))
    beta = np.zeros(p)
    for k, j in enumerate(strong):
        beta[j] = amp * (1 if k % 2 == 0 else -1)
    y = Response(values=X.values @ beta + noise * rng.standard_normal(n))
    return X, y, beta


def test_split_rows_partitions():
    X, y, _ = _data(0)
    sd = split_rows(X, y, 30, seed=1)
    assert sd.n0 == 30 and sd.n1 == 50
    x0, y0 = sd.part0
    x1, y1 = sd.part1
    # each original row appears exactly once across the parts
    stacked = np.vstack([x0.values, x1.values])
    assert sorted(map(tuple, stacked)) == sorted(map(tuple, X.values))


def test_split_rows_deterministic():
    X, y, _ = _data(1)
    a = split_rows(X, y, 20, seed=5)
    b = split_rows(X, y, 20, seed=5)
    np.testing.assert_array_equal(a.part0[0].values, b.part0[0].values)


def test_split_rows_bad_n0():
    X, y, _ = _data(2)
    with pytest.raises(DimensionError):
        split_rows(X, y, 0)
    with pytest.raises(DimensionError):
        split_rows(X, y, X.n)


def test_random_rotation_is_orthonormal():
    U = random_rotation(15, seed=3).U
    np.testing.assert_allclose(U.T @ U, np.eye(15), atol=1e-10)
    np.testing.assert_array_equal(U, random_rotation(15, seed=3).U)


def test_rotate_then_split_preserves_gram_and_fit():
    X, y, beta = _data(3)
    sd = rotate_then_split(X, y, 30, seed=4)
    x0, x1 = sd.part0[0].values, sd.part1[0].values
    combined = np.vstack([x0, x1])
    np.testing.assert_allclose(combined.T @ combined, X.values.T @ X.values, atol=1e-10)
    yr = np.concatenate([sd.part0[1].values, sd.part1[1].values])
    # the noiseless relation y = X beta rotates consistently
    resid = yr - combined @ np.linalg.lstsq(combined, yr, rcond=None)[0]
    orig = y.values - X.values @ np.linalg.lstsq(X.values, y.values, rcond=None)[0]
    np.testing.assert_allclose(np.linalg.norm(resid), np.linalg.norm(orig), atol=1e-8)


def test_marginal_prescreen_picks_strongest():
    X, y, beta = _data(4, noise=0.1)
    keep = marginal_prescreen(X, y, 4)
    assert set(np.flatnonzero(beta)) <= set(keep)
    np.testing.assert_array_equal(keep, np.sort(keep))


def test_marginal_prescreen_tiebreak_low_index():
    X = Design.from_matrix(np.hstack([np.ones((5, 1)), np.ones((5, 1)), -np.ones((5, 1))]))
    y = Response(values=np.ones(5))
    np.testing.assert_array_equal(marginal_prescreen(X, y, 2), [0, 1])


def test_lasso_screen_finds_signals_and_signs():
    X, y, beta = _data(5, amp=5.0, noise=0.2)
    res = lasso_screen(X, y, k_max=6)
    assert set(np.flatnonzero(beta)) <= set(res.s0)
    for j in np.flatnonzero(beta):
        assert res.signs0[j] == np.sign(beta[j])


def test_lasso_screen_respects_k_max():
    X, y, _ = _data(6)
    res = lasso_screen(X, y, k_max=3)
    assert len(res.s0) <= 3


def test_screen_result_invariants():
    with pytest.raises(DimensionError):
        ScreenResult(s0=(1, 2), signs0={1: 1}, k_max=5)
    with pytest.raises(DimensionError):
        ScreenResult(s0=(1, 2, 3), signs0={1: 1, 2: 1, 3: 1}, k_max=2)
