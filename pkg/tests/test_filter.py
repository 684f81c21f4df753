import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirfdr.errors import ConfigError, DimensionError
from dirfdr.filter import (SelectionResult, StatVector, estimate_signs,
                           knockoff_threshold, select, stat_coef_diff,
                           stat_lasso_entry, stat_omp_entry, zero_out_identical_pairs)
from dirfdr.knockoffs import construct_knockoffs, equicorrelated_s
from dirfdr.model import Design, normalize_columns
from dirfdr.solvers import EntryPath


def _w(vals):
    return StatVector(w=np.asarray(vals, dtype=float), rule="coef-diff")


def test_threshold_hand_example():
    w = _w([3.0, -1.0, 2.0])
    # plain: at t=1, 1 negative / 2 positives = 0.5
    assert knockoff_threshold(w, 0.5, plus=False) == 1.0
    # plus: at t=1 ratio (1+1)/2 = 1; at t=2 ratio (1+0)/2 = 0.5
    assert knockoff_threshold(w, 0.5, plus=True) == 2.0


def test_threshold_no_candidate_is_inf():
    assert math.isinf(knockoff_threshold(_w([0.0, 0.0]), 0.2, plus=True))
    # all negatives: numerator can never be <= q * positives
    assert math.isinf(knockoff_threshold(_w([-1.0, -2.0]), 0.2, plus=False))


def test_threshold_all_positive():
    w = _w([5.0, 4.0, 3.0, 2.0, 1.0])
    assert knockoff_threshold(w, 0.2, plus=False) == 1.0
    # plus needs 1/positives <= q: 1/5 = 0.2
    assert knockoff_threshold(w, 0.2, plus=True) == 1.0


def test_threshold_rejects_bad_q():
    with pytest.raises(ConfigError):
        knockoff_threshold(_w([1.0]), 0.0, plus=True)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=30),
       st.floats(0.05, 0.95))
def test_threshold_selection_satisfies_target_ratio(vals, q):
    w = _w(vals)
    t = knockoff_threshold(w, q, plus=False)
    if math.isinf(t):
        return
    arr = w.w
    pos = np.count_nonzero(arr >= t)
    neg = np.count_nonzero(arr <= -t)
    assert pos > 0 and neg / pos <= q


def test_select_uses_threshold():
    w = _w([3.0, -1.0, 2.0, 0.5])
    assert select(w, 2.0) == frozenset({0, 2})
    assert select(w, math.inf) == frozenset()
    with pytest.raises(ConfigError):
        select(w, -1.0)


def test_stat_lasso_entry_signs_and_ties():
    # coords 0..2 features, 3..5 knockoffs
    entry_lambda = np.array([3.0, 1.0, 2.0, 1.0, 1.0, 0.0])
    entry_sign = np.sign(entry_lambda).astype(np.int8)
    path = EntryPath(entry_lambda=entry_lambda, entry_sign=entry_sign,
                     entry_order=(0, 2, 1, 3, 4))
    w = stat_lasso_entry(path).w
    assert w[0] == 3.0          # feature first
    assert w[1] == 0.0          # exact tie -> 0
    assert w[2] == 2.0          # knockoff never entered
    assert stat_lasso_entry(path).rule == "lasso-entry"


def test_stat_lasso_entry_knockoff_first_is_negative():
    entry_lambda = np.array([1.0, 4.0])
    path = EntryPath(entry_lambda=entry_lambda,
                     entry_sign=np.array([1, -1], dtype=np.int8),
                     entry_order=(1, 0))
    assert stat_lasso_entry(path).w[0] == -4.0


def test_stat_coef_diff():
    w = stat_coef_diff(np.array([2.0, -1.0]), np.array([0.5, -3.0]))
    np.testing.assert_allclose(w.w, [1.5, -2.0])
    with pytest.raises(DimensionError):
        stat_coef_diff(np.ones(2), np.ones(3))


def test_stat_omp_entry():
    # m=2: order picks knockoff of 0 first, then feature 1
    w = stat_omp_entry([2, 1], m=2).w
    assert w[0] == -4.0  # knockoff picked at step 0 of 4
    assert w[1] == 3.0   # feature picked at step 1 of 4


def test_stat_omp_entry_absent_pair_zero():
    assert stat_omp_entry([0], m=2).w[1] == 0.0


def test_zero_out_identical_pairs():
    w = _w([2.0, -3.0, 1.0])
    out = zero_out_identical_pairs(w, np.array([0.5, 0.0, 0.5]))
    np.testing.assert_array_equal(out.w, [2.0, 0.0, 1.0])


def test_estimate_signs_known_direction():
    rng = np.random.default_rng(0)
    X = normalize_columns(Design.from_matrix(rng.standard_normal((50, 4))))
    s = equicorrelated_s(X.values.T @ X.values)
    pair = construct_knockoffs(X, s, seed=1)
    beta = np.array([4.0, -4.0, 0.0, 0.0])
    y = pair.X.values @ beta + 0.01 * rng.standard_normal(50)
    signs = estimate_signs(pair, y, {0, 1})
    assert signs == {0: 1, 1: -1}


def test_selection_result_signs_must_match_selected():
    with pytest.raises(DimensionError):
        SelectionResult(selected=frozenset({1}), signs={2: 1}, threshold=1.0,
                        plus=True, q=0.2)


def test_stat_vector_rejects_nan():
    with pytest.raises(DimensionError):
        StatVector(w=np.array([1.0, np.nan]), rule="coef-diff")
