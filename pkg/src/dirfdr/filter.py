"""Knockoff statistics W, data-dependent thresholds, selection, and signs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .knockoffs import KnockoffPair, S_ZERO_TOL
from .solvers import EntryPath

STAT_RULES = ("lasso-entry", "coef-diff", "omp-entry", "sqrt-lasso-entry")


@dataclass(frozen=True)
class StatVector:
    """Per-feature signed statistics with the rule that produced them."""

    w: np.ndarray
    rule: str

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if not np.isfinite(w).all():
            raise DimensionError("statistics must be finite")
        if self.rule not in STAT_RULES:
            raise ConfigError(f"unknown statistic rule {self.rule!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def p(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class SelectionResult:
    """Selected indices, their estimated effect signs, and the threshold."""

    selected: frozenset
    signs: dict
    threshold: float
    plus: bool
    q: float
    diagnostics: str = ""

    def __post_init__(self):
        object.__setattr__(self, "selected", frozenset(self.selected))
        object.__setattr__(self, "signs", dict(self.signs))
        if set(self.signs) != set(self.selected):
            raise DimensionError("signs must be defined exactly on the selected set")


def stat_lasso_entry(path: EntryPath, rule: str = "lasso-entry") -> StatVector:
    """Entry-lambda statistic on an augmented path over 2m coordinates.

    W_j = max(entry_lambda[j], entry_lambda[j+m]), positive if the feature
    entered strictly first, negative if its knockoff did, zero on exact
    ties or if neither entered.
    """
    two_m = path.m
    if two_m % 2 != 0:
        raise DimensionError(f"augmented path must cover an even coordinate count, got {two_m}")
    m = two_m // 2
    feat = path.entry_lambda[:m]
    knock = path.entry_lambda[m:]
    w = np.maximum(feat, knock)
    sign = np.sign(feat - knock)
    return StatVector(w=w * sign, rule=rule)


def stat_coef_diff(beta_hat: np.ndarray, beta_tilde: np.ndarray) -> StatVector:
    """W_j = |beta_hat_j| - |beta_tilde_j|."""
    bh = np.asarray(beta_hat, dtype=np.float64).reshape(-1)
    bt = np.asarray(beta_tilde, dtype=np.float64).reshape(-1)
    if bh.shape != bt.shape:
        raise DimensionError(f"coefficient vectors differ in length: {bh.shape[0]} vs {bt.shape[0]}")
    return StatVector(w=np.abs(bh) - np.abs(bt), rule="coef-diff")


def stat_omp_entry(order: list, m: int) -> StatVector:
    """Forward-selection entry statistic from an OMP order over 2m coordinates.

    The pair (j, j+m) scores the number of steps remaining when the first
    of the pair was picked (earlier pick = larger value), signed by whether
    the feature or its knockoff was picked first; zero if neither appears.
    """
    total = 2 * m
    rank = {j: t for t, j in enumerate(order)}
    w = np.zeros(m)
    for j in range(m):
        rf = rank.get(j)
        rk = rank.get(j + m)
        if rf is None and rk is None:
            continue
        if rk is None or (rf is not None and rf < rk):
            w[j] = total - rf
        else:
            w[j] = -(total - rk)
    return StatVector(w=w, rule="omp-entry")


def knockoff_threshold(w: StatVector, q: float, plus: bool) -> float:
    """Data-dependent threshold over the candidate set {|W_j| : |W_j| > 0}.

    Returns the smallest t with #{W_j <= -t} / #{W_j >= t} <= q (knockoff)
    or (1 + #{W_j <= -t}) / #{W_j >= t} <= q (knockoff+), or +inf when no
    candidate qualifies.
    """
    if not 0.0 < q < 1.0:
        raise ConfigError(f"q must be in (0, 1), got {q}")
    vals = w.w
    candidates = np.unique(np.abs(vals[vals != 0.0]))
    for t in candidates:
        pos = int(np.count_nonzero(vals >= t))
        neg = int(np.count_nonzero(vals <= -t))
        num = neg + 1 if plus else neg
        if pos > 0 and num / pos <= q:
            return float(t)
    return math.inf


def select(w: StatVector, threshold: float) -> frozenset:
    """{j : W_j >= threshold}; empty when the threshold is +inf."""
    if not threshold > 0:
        raise ConfigError(f"threshold must be positive or +inf, got {threshold}")
    if math.isinf(threshold):
        return frozenset()
    return frozenset(np.flatnonzero(w.w >= threshold).tolist())


def estimate_signs(pair: KnockoffPair, y, selected) -> dict:
    """Effect-sign estimates sign((X_j - Xt_j)^T y) for each selected j.

    An exact zero inner product (a measure-zero event under continuous
    noise) resolves to +1.
    """
    yv = np.asarray(getattr(y, "values", y), dtype=np.float64).reshape(-1)
    diff = pair.X.values - pair.X_tilde.values
    signs = {}
    for j in sorted(selected):
        inner = float(diff[:, j] @ yv)
        signs[j] = 1 if inner >= 0.0 else -1
    return signs


def zero_out_identical_pairs(w: StatVector, s: np.ndarray) -> StatVector:
    """Force W_j = 0 where s_j ~ 0 (feature and knockoff are the same column)."""
    vals = np.array(w.w)
    vals[np.asarray(s) < S_ZERO_TOL] = 0.0
    return StatVector(w=vals, rule=w.rule)
