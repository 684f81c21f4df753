"""End-to-end selection procedures.

Low-dimensional knockoff filter, the high-dimensional screen-then-infer
procedure with data splitting or data recycling (optionally sign
restricted), and the least-squares + Benjamini-Hochberg baseline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats as _scipy_stats

from .errors import ConfigError, DimensionError, SingularDesignError
from .filter import (SelectionResult, StatVector, estimate_signs, knockoff_threshold,
                     select, stat_coef_diff, stat_lasso_entry, stat_omp_entry,
                     zero_out_identical_pairs)
from .knockoffs import KnockoffPair, construct_knockoffs, equicorrelated_s, recycle_knockoffs
from .model import Design, Response, normalize_columns
from .screening import ScreenResult, lasso_screen, marginal_prescreen, random_rotation
from .solvers import SignConstraints, lasso_path, least_squares, omp, sqrt_lasso


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for the high-dimensional screen + knockoff procedure."""

    q: float = 0.2
    n0: int = 0
    k_max: int = 0
    mode: str = "recycle"           # "split" or "recycle"
    sign_restricted: bool = False
    statistic: str = "lasso-entry"  # lasso-entry | coef-diff | omp-entry | sqrt-lasso-entry
    plus: bool = True
    rotate: bool = False
    prescreen_m: int | None = None
    kappa: float = 0.7
    seed: int = 0
    grid_size: int = 200
    lambda_min_ratio: float = 1e-3
    sqrt_lasso_mc_reps: int = 500

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ConfigError(f"q must be in (0, 1), got {self.q}")
        if self.mode not in ("split", "recycle"):
            raise ConfigError(f"mode must be 'split' or 'recycle', got {self.mode!r}")
        if self.statistic not in ("lasso-entry", "coef-diff", "omp-entry", "sqrt-lasso-entry"):
            raise ConfigError(f"unknown statistic {self.statistic!r}")


@dataclass(frozen=True)
class ScreenedModelRef:
    """Screened feature set plus evaluation-only partial coefficients."""

    s0: tuple
    beta_partial: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "s0", tuple(self.s0))
        if self.beta_partial is not None:
            bp = np.asarray(self.beta_partial, dtype=np.float64).reshape(-1)
            if bp.shape[0] != len(self.s0):
                raise DimensionError("beta_partial length must equal |s0|")
            object.__setattr__(self, "beta_partial", bp)


class HighDimResult(NamedTuple):
    selection: SelectionResult
    screen: ScreenResult
    model_ref: ScreenedModelRef


def partial_coefficients(X1_s0: Design, mu1) -> np.ndarray:
    """Partial regression coefficients (X1^T X1)^-1 X1^T mu1 of the known
    conditional mean mu1 on the screened part-1 design (evaluation only)."""
    return least_squares(X1_s0, mu1)


def bh_stepup(pvalues, q: float) -> frozenset:
    """Benjamini-Hochberg step-up: reject the k* smallest p-values where
    k* = max{k : p_(k) <= k q / m} (none if the set is empty)."""
    pv = np.asarray(pvalues, dtype=np.float64).reshape(-1)
    if ((pv < 0.0) | (pv > 1.0)).any() or not np.isfinite(pv).all():
        raise ConfigError("p-values must lie in [0, 1]")
    if not 0.0 < q < 1.0:
        raise ConfigError(f"q must be in (0, 1), got {q}")
    m = pv.shape[0]
    order = np.argsort(pv, kind="stable")
    sorted_p = pv[order]
    thresholds = q * np.arange(1, m + 1) / m
    passing = np.flatnonzero(sorted_p <= thresholds)
    if passing.size == 0:
        return frozenset()
    k_star = passing[-1] + 1
    return frozenset(order[:k_star].tolist())


def _compute_stat(statistic: str, A: np.ndarray, resp: np.ndarray,
                  m: int, constraints: SignConstraints | None,
                  cfg: PipelineConfig) -> StatVector:
    if statistic == "lasso-entry":
        path = lasso_path(A, resp, grid_size=cfg.grid_size,
                          lambda_min_ratio=cfg.lambda_min_ratio, constraints=constraints)
        return stat_lasso_entry(path)
    if statistic in ("coef-diff", "sqrt-lasso-entry"):
        if statistic == "coef-diff":
            beta = sqrt_lasso(A, resp, cfg.kappa, constraints=constraints,
                              seed=cfg.seed + 104729, mc_reps=cfg.sqrt_lasso_mc_reps)
            return stat_coef_diff(beta[:m], beta[m:])
        # sqrt-lasso entry order coincides with the lasso entry order (the
        # square-root lasso path is a reparametrization of the lasso path);
        # only the rule tag differs.
        path = lasso_path(A, resp, grid_size=cfg.grid_size,
                          lambda_min_ratio=cfg.lambda_min_ratio, constraints=constraints)
        return stat_lasso_entry(path, rule="sqrt-lasso-entry")
    if statistic == "omp-entry":
        if constraints is not None and np.any(constraints.required_sign != 0):
            raise ConfigError("omp-entry does not support sign restrictions")
        order = omp(A, resp, k=min(A.shape[0], A.shape[1]))
        return stat_omp_entry(order, m)
    raise ConfigError(f"unknown statistic {statistic!r}")


def knockoff_filter_lowdim(X: Design, y: Response, q: float,
                           statistic: str = "lasso-entry", plus: bool = True,
                           seed: int = 0, cfg: PipelineConfig | None = None) -> SelectionResult:
    """Low-dimensional knockoff filter (n >= 2p): normalize, construct
    equicorrelated knockoffs, compute W on the augmented design, threshold,
    select, and estimate effect signs."""
    if cfg is None:
        cfg = PipelineConfig(q=q, statistic=statistic, plus=plus, seed=seed)
    Xn = normalize_columns(X)
    s = equicorrelated_s(Xn.values.T @ Xn.values)
    pair = construct_knockoffs(Xn, s, seed=seed)
    A = np.hstack([pair.X.values, pair.X_tilde.values])
    w = _compute_stat(statistic, A, y.values, Xn.p, None, cfg)
    w = zero_out_identical_pairs(w, pair.s)
    t = knockoff_threshold(w, q, plus)
    chosen = select(w, t)
    signs = estimate_signs(pair, y, chosen)
    return SelectionResult(selected=chosen, signs=signs, threshold=t, plus=plus, q=q)


def _prepare_rows(X: Design, y: Response, cfg: PipelineConfig, mu=None):
    """Rotate or permute rows so screening rows come first; mu (the known
    noiseless mean, evaluation only) undergoes the identical transform."""
    n = X.n
    if not 1 <= cfg.n0 < n:
        raise ConfigError(f"n0 must be in [1, {n - 1}], got {cfg.n0}")
    yv = y.values
    muv = None if mu is None else np.asarray(getattr(mu, "values", mu), dtype=np.float64).reshape(-1)
    if cfg.rotate:
        U = random_rotation(n, cfg.seed).U
        xp, yp = U @ X.values, U @ yv
        mup = None if muv is None else U @ muv
    else:
        perm = np.random.default_rng(cfg.seed).permutation(n)
        idx = np.concatenate([np.sort(perm[:cfg.n0]), np.sort(perm[cfg.n0:])])
        xp, yp = X.values[idx], yv[idx]
        mup = None if muv is None else muv[idx]
    return xp, yp, mup


def _screen(xp: np.ndarray, yp: np.ndarray, cfg: PipelineConfig) -> ScreenResult:
    n0 = cfg.n0
    p = xp.shape[1]
    x0 = Design.from_matrix(xp[:n0])
    y0 = Response(values=yp[:n0])
    cols = np.arange(p)
    if cfg.prescreen_m is not None:
        if cfg.prescreen_m > p:
            raise ConfigError(f"prescreen_m={cfg.prescreen_m} exceeds p={p}")
        cols = marginal_prescreen(x0, y0, cfg.prescreen_m)
        x0 = Design.from_matrix(xp[:n0][:, cols])
    if cfg.k_max < 1:
        raise ConfigError(f"k_max must be >= 1, got {cfg.k_max}")
    res = lasso_screen(x0, y0, cfg.k_max, grid_size=cfg.grid_size,
                       lambda_min_ratio=cfg.lambda_min_ratio)
    s0 = tuple(int(cols[j]) for j in res.s0)
    signs0 = {int(cols[j]): res.signs0[j] for j in res.s0}
    return ScreenResult(s0=s0, signs0=signs0, k_max=cfg.k_max)


def _empty_selection(cfg: PipelineConfig, note: str) -> SelectionResult:
    return SelectionResult(selected=frozenset(), signs={}, threshold=math.inf,
                           plus=cfg.plus, q=cfg.q, diagnostics=note)


def knockoff_filter_highdim(X: Design, y: Response, cfg: PipelineConfig,
                            mu=None) -> HighDimResult:
    """Screen on part 0, then run the knockoff filter on the screened
    features using part-1 knockoffs, with data splitting or recycling.

    Selected indices are reported in original feature numbering. When mu
    (the noiseless conditional mean on the original rows) is supplied, the
    returned model_ref carries the partial regression coefficients of the
    screened part-1 submodel for reduced-model scoring.
    """
    n = X.n
    n1 = n - cfg.n0
    if 2 * cfg.k_max > n1:
        raise ConfigError(f"need 2*k_max <= n1 for knockoff construction "
                          f"(k_max={cfg.k_max}, n1={n1})")
    xp, yp, mup = _prepare_rows(X, y, cfg, mu)
    screen = _screen(xp, yp, cfg)
    s0 = list(screen.s0)
    if not s0:
        return HighDimResult(_empty_selection(cfg, "screening returned no features"),
                             screen, ScreenedModelRef(s0=()))
    if 2 * len(s0) > n1:
        keep = n1 // 2
        warnings.warn(f"screened set of size {len(s0)} exceeds n1/2={n1 / 2:g}; "
                      f"truncating to the first {keep} by entry order")
        s0 = s0[:keep]
        screen = ScreenResult(s0=tuple(s0), signs0={j: screen.signs0[j] for j in s0},
                              k_max=screen.k_max)

    n0 = cfg.n0
    x_s0 = xp[:, s0]
    # rescale so the part-1 block has unit-norm columns (knockoff contract)
    part1_norms = np.linalg.norm(x_s0[n0:], axis=0)
    if (part1_norms == 0.0).any():
        return HighDimResult(_empty_selection(cfg, "screened feature vanishes on part 1"),
                             screen, ScreenedModelRef(s0=tuple(s0)))
    x_s0 = x_s0 / part1_norms
    x1 = Design(values=x_s0[n0:], column_norms=part1_norms, normalized=True)
    s_vec = equicorrelated_s(x1.values.T @ x1.values)
    pair1 = construct_knockoffs(x1, s_vec, seed=cfg.seed + 7919)

    x_full = Design.from_matrix(x_s0)
    xt_full = recycle_knockoffs(x_full, pair1.X_tilde, n0)
    if cfg.mode == "recycle":
        A = np.hstack([x_full.values, xt_full.values])
        resp = yp
        pair_used = KnockoffPair(X=x_full, X_tilde=xt_full, s=pair1.s,
                                 gram=A.T @ A)
        y_used = resp
    else:
        A = np.hstack([pair1.X.values, pair1.X_tilde.values])
        resp = yp[n0:]
        pair_used = pair1
        y_used = resp

    constraints = None
    if cfg.sign_restricted:
        rs = np.array([screen.signs0[j] for j in s0], dtype=np.int8)
        constraints = SignConstraints(required_sign=np.concatenate([rs, rs]))

    w = _compute_stat(cfg.statistic, A, resp, len(s0), constraints, cfg)
    w = zero_out_identical_pairs(w, pair1.s)
    t = knockoff_threshold(w, cfg.q, cfg.plus)
    chosen_local = select(w, t)
    signs_local = estimate_signs(pair_used, y_used, chosen_local)
    selected = frozenset(s0[j] for j in chosen_local)
    signs = {s0[j]: sgn for j, sgn in signs_local.items()}
    selection = SelectionResult(selected=selected, signs=signs, threshold=t,
                                plus=cfg.plus, q=cfg.q)

    beta_partial = None
    if mup is not None:
        beta_partial = partial_coefficients(x1, mup[n0:])
    model_ref = ScreenedModelRef(s0=tuple(s0), beta_partial=beta_partial)
    return HighDimResult(selection, screen, model_ref)


def bh_baseline(X: Design, y: Response, cfg: PipelineConfig, mu=None) -> HighDimResult:
    """Screen + least squares + one-sided t p-values + BH step-up.

    Uses the same split/screen path as knockoff_filter_highdim (matched by
    seed); the one-sided alternative for each feature is the sign it
    carried when entering the screening lasso path, and reported signs are
    those screening signs.
    """
    xp, yp, mup = _prepare_rows(X, y, cfg, mu)
    screen = _screen(xp, yp, cfg)
    s0 = list(screen.s0)
    if not s0:
        return HighDimResult(_empty_selection(cfg, "screening returned no features"),
                             screen, ScreenedModelRef(s0=()))
    n0 = cfg.n0
    n1 = xp.shape[0] - n0
    dof = n1 - len(s0)
    if dof <= 0:
        raise ConfigError(f"BH baseline needs n1 > |S0| (n1={n1}, |S0|={len(s0)})")
    x1 = xp[n0:][:, s0]
    y1 = yp[n0:]
    gram = x1.T @ x1
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("screened part-1 design is rank deficient") from exc
    beta_ls = gram_inv @ (x1.T @ y1)
    resid = y1 - x1 @ beta_ls
    sigma_hat = math.sqrt(float(resid @ resid) / dof)
    se = sigma_hat * np.sqrt(np.diag(gram_inv))
    tscores = beta_ls / se
    signs0 = np.array([screen.signs0[j] for j in s0], dtype=np.float64)
    pvals = _scipy_stats.t.sf(signs0 * tscores, df=dof)
    rejected_local = bh_stepup(pvals, cfg.q)
    selected = frozenset(s0[j] for j in rejected_local)
    signs = {s0[j]: int(screen.signs0[s0[j]]) for j in rejected_local}
    selection = SelectionResult(selected=selected, signs=signs,
                                threshold=math.inf if not selected else math.nan,
                                plus=False, q=cfg.q, diagnostics="bh-baseline")
    beta_partial = None
    if mup is not None:
        beta_partial = partial_coefficients(Design.from_matrix(x1), mup[n0:])
    return HighDimResult(selection, screen, ScreenedModelRef(s0=tuple(s0), beta_partial=beta_partial))
