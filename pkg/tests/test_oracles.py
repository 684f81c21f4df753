import numpy as np
import pytest

from dirfdr.errors import ConfigError
from dirfdr.knockoffs import construct_knockoffs, equicorrelated_s
from dirfdr.model import Design, normalize_columns
from dirfdr.oracles import (BernoulliStoppingInstance, GramReport, fixed_stop_rule,
                            gram_check, knockoff_ratio_rule, stopping_ratio_exact,
                            random_stopping_instance, scalar_lasso_oracle,
                            swap_antisymmetry_check, tail_count_rule)


def test_stopping_ratio_hand_example_always_stop():
    # n=2, rho=(0.5, 0.5), always stop at J=n: outcomes (0,0),(0,1),(1,0),(1,1)
    # give values 3, 3/2, 3/2, 1, each with weight 1/4 -> 7/4
    inst = BernoulliStoppingInstance(rho=(0.5, 0.5), rho_floor=0.5,
                                     stopping_rule=fixed_stop_rule(2))
    assert stopping_ratio_exact(inst) == pytest.approx(7.0 / 4.0)
    assert stopping_ratio_exact(inst) <= 2.0


@pytest.mark.parametrize("rho1", [0.1, 0.3, 0.5, 0.9, 1.0])
def test_stopping_ratio_hand_example_n1_closed_form(rho1):
    inst = BernoulliStoppingInstance(rho=(rho1,), rho_floor=rho1,
                                     stopping_rule=fixed_stop_rule(1))
    val = stopping_ratio_exact(inst)
    assert val == pytest.approx(2.0 - rho1)
    assert val <= 1.0 / rho1 + 1e-12


def test_stopping_ratio_all_ones_is_one():
    inst = BernoulliStoppingInstance(rho=(1.0, 1.0, 1.0), rho_floor=1.0,
                                     stopping_rule=fixed_stop_rule(3))
    assert stopping_ratio_exact(inst) == pytest.approx(1.0)


def test_stopping_ratio_never_stopping_is_one():
    inst = BernoulliStoppingInstance(rho=(0.5, 0.5), rho_floor=0.5,
                                     stopping_rule=lambda j, s, tail: False)
    assert stopping_ratio_exact(inst) == pytest.approx(1.0)


def test_stopping_ratio_randomized_sweep_respects_bound():
    rng = np.random.default_rng(0)
    for _ in range(60):
        floor = float(rng.choice([0.3, 0.5, 0.7]))
        inst = random_stopping_instance(rng, floor, n_max=8)
        assert stopping_ratio_exact(inst) <= 1.0 / floor + 1e-12


def test_stopping_ratio_ratio_rule_runs():
    inst = BernoulliStoppingInstance(rho=(0.5, 0.6, 0.7), rho_floor=0.5,
                                     stopping_rule=knockoff_ratio_rule(1.0))
    assert stopping_ratio_exact(inst) <= 2.0 + 1e-12


def test_stopping_ratio_rejects_large_n():
    with pytest.raises(ConfigError):
        BernoulliStoppingInstance(rho=(0.5,) * 17, rho_floor=0.5,
                                  stopping_rule=fixed_stop_rule(1))


def test_tail_count_rule_uses_tail_only():
    rule = tail_count_rule(1)
    assert rule(1, 0, (1, 0)) is True
    assert rule(2, 1, (0,)) is False


def test_gram_report_rejects_negative():
    with pytest.raises(Exception):
        GramReport(same_gram=-1.0, cross_gram=0.0, diff_gram=0.0, mixed_gram=0.0)


def test_gram_check_identical_copy_zero_residuals():
    X = normalize_columns(Design.from_matrix(np.random.default_rng(1).standard_normal((20, 4))))
    from dirfdr.knockoffs import KnockoffPair
    A = np.hstack([X.values, X.values])
    pair = KnockoffPair(X=X, X_tilde=X, s=np.zeros(4), gram=A.T @ A)
    assert gram_check(pair).worst() == 0.0


def test_scalar_lasso_oracle_values():
    x = np.zeros(9)
    x[0] = 1.0
    y = np.zeros(9)
    y[0] = 3.0
    assert scalar_lasso_oracle(x, y, 1.0) == 2.0
    assert scalar_lasso_oracle(x, y, 3.5) == 0.0
    assert scalar_lasso_oracle(x, -y, 1.0) == -2.0


def test_swap_antisymmetry_empty_and_full_swap():
    rng = np.random.default_rng(2)
    X = normalize_columns(Design.from_matrix(rng.standard_normal((40, 5))))
    s = equicorrelated_s(X.values.T @ X.values)
    pair = construct_knockoffs(X, s, seed=3)
    y = pair.X.values @ np.array([3.0, -3.0, 0.0, 0.0, 0.0]) + 0.2 * rng.standard_normal(40)
    assert swap_antisymmetry_check("coef-diff", pair.X.values, pair.X_tilde.values,
                                   y, set(), 1e-8)
    assert swap_antisymmetry_check("coef-diff", pair.X.values, pair.X_tilde.values,
                                   y, set(range(5)), 1e-8)


def test_swap_antisymmetry_random_sets():
    rng = np.random.default_rng(4)
    for i in range(5):
        X = normalize_columns(Design.from_matrix(rng.standard_normal((40, 5))))
        s = equicorrelated_s(X.values.T @ X.values)
        pair = construct_knockoffs(X, s, seed=i)
        y = pair.X.values @ rng.standard_normal(5) + rng.standard_normal(40)
        swap = set(np.flatnonzero(rng.random(5) < 0.5).tolist())
        assert swap_antisymmetry_check("coef-diff", pair.X.values,
                                       pair.X_tilde.values, y, swap, 1e-8)
