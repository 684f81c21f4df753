"""Per-trial error and power functionals, and mean/SE aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .model import LinearModelSpec


@dataclass(frozen=True)
class TrialScore:
    fdp: float
    fdp_dir: float
    mfdr_dir_summand: float
    power: float
    restricted_power: float
    n_selected: int

    def __post_init__(self):
        if self.fdp > self.fdp_dir + 1e-12:
            raise DimensionError("fdp cannot exceed fdp_dir")


def fdp(selected, truth: LinearModelSpec) -> float:
    """Classical false discovery proportion: zero-effect selections over
    max(|selected|, 1)."""
    sel = set(selected)
    if any(j < 0 or j >= truth.p for j in sel):
        raise DimensionError("selected index out of range")
    false = sum(1 for j in sel if truth.beta[j] == 0.0)
    return false / max(len(sel), 1)


def fdp_dir(selected, signs: dict, true_signs) -> float:
    """Directional FDP: selections whose declared sign differs from the
    true sign (with sign(0) = 0, so zero effects always count as errors)."""
    sel = set(selected)
    ts = np.asarray(true_signs)
    errors = sum(1 for j in sel if signs[j] != ts[j])
    return errors / max(len(sel), 1)


def mfdr_dir_summand(selected, signs: dict, true_signs, q: float) -> float:
    """Per-trial summand of the modified directional FDR: sign errors over
    |selected| + 1/q."""
    if not 0.0 < q < 1.0:
        raise ConfigError(f"q must be in (0, 1), got {q}")
    sel = set(selected)
    ts = np.asarray(true_signs)
    errors = sum(1 for j in sel if signs[j] != ts[j])
    return errors / (len(sel) + 1.0 / q)


def power(selected, truth: LinearModelSpec, restricted_to=None) -> float:
    """|selected ∩ S*| / |S*| over the support (or a restriction of it).

    Defined as 0 with a warning when the reference support is empty.
    """
    target = truth.support if restricted_to is None else (truth.support & set(restricted_to))
    if not target:
        import warnings
        warnings.warn("power is undefined for an empty support; returning 0")
        return 0.0
    return len(set(selected) & target) / len(target)


def score_trial(selected, signs: dict, truth: LinearModelSpec, q: float,
                true_signs=None, strong_set=None) -> TrialScore:
    """Assemble a TrialScore; true_signs defaults to sign(beta).

    When true_signs is supplied (reduced-model scoring) all entries —
    including the classical fdp and the power denominators — are computed
    against the support and signs of that reference model, so the
    fdp <= fdp_dir relation is preserved.
    """
    ts = truth.true_signs() if true_signs is None else np.asarray(true_signs)
    sel = set(selected)
    if any(j < 0 or j >= ts.shape[0] for j in sel):
        raise DimensionError("selected index out of range")
    support = {int(j) for j in np.flatnonzero(ts)}
    n_false = sum(1 for j in sel if ts[j] == 0)
    target = support & set(strong_set) if strong_set else set()
    return TrialScore(
        fdp=n_false / max(len(sel), 1),
        fdp_dir=fdp_dir(selected, signs, ts),
        mfdr_dir_summand=mfdr_dir_summand(selected, signs, ts, q),
        power=len(sel & support) / len(support) if support else 0.0,
        restricted_power=len(sel & target) / len(target) if target else 0.0,
        n_selected=len(sel),
    )


def mean_and_se(values) -> tuple:
    """Sample mean and standard error (sd / sqrt(count)); SE is 0 for a
    single value."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))
