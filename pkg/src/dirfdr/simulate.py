"""Synthetic designs, coefficient vectors, responses, and the multi-trial
experiment driver.

The design matrix and coefficient vector are generated once per setting;
only the noise is redrawn per trial. Trials run on independent RNG streams
derived from (master seed, trial index), so results are identical for any
thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DegenerateInputError, DimensionError
from .metrics import mean_and_se, score_trial
from .model import Design, LinearModelSpec, Response, normalize_columns
from .pipeline import PipelineConfig, bh_baseline, knockoff_filter_highdim, knockoff_filter_lowdim


@dataclass(frozen=True)
class DesignSpec:
    """AR(1)-correlated Gaussian rows or a general Gaussian row model."""

    kind: str = "ar"                 # "ar" or "gaussian-general"
    n: int = 600
    p: int = 800
    rho: float = 0.0
    nu: np.ndarray | None = None     # gaussian-general mean
    psi: np.ndarray | None = None    # gaussian-general covariance

    def __post_init__(self):
        if self.kind not in ("ar", "gaussian-general"):
            raise ConfigError(f"unknown design kind {self.kind!r}")
        if self.kind == "ar" and not 0.0 <= self.rho < 1.0:
            raise ConfigError(f"rho must be in [0, 1), got {self.rho}")
        if self.kind == "gaussian-general":
            if self.psi is None:
                raise ConfigError("gaussian-general design needs a covariance psi")
            psi = np.asarray(self.psi, dtype=np.float64)
            if psi.shape != (self.p, self.p) or np.abs(psi - psi.T).max() > 1e-10:
                raise ConfigError("psi must be a symmetric p x p matrix")
            if np.linalg.eigvalsh(psi)[0] <= 0:
                raise ConfigError("psi must be positive definite")
            object.__setattr__(self, "psi", psi)
            if self.nu is not None:
                object.__setattr__(self, "nu", np.asarray(self.nu, dtype=np.float64).reshape(-1))


@dataclass(frozen=True)
class CoefSpec:
    """Strong (+/- strong_amp) and weak (Gaussian) signal layout."""

    k0: int = 10
    k1: int = 40
    strong_amp: float = 4.5
    weak_sd: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.k0 < 0 or self.k1 < 0:
            raise ConfigError("signal counts must be nonnegative")
        if self.strong_amp <= 0 or self.weak_sd <= 0:
            raise ConfigError("strong_amp and weak_sd must be positive")


@dataclass(frozen=True)
class GeneralGaussianResponse:
    """Mean and covariance of a general Gaussian response model."""

    mu: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (mu.shape[0], mu.shape[0]):
            raise DimensionError("theta must be n x n for a length-n mean")
        if np.abs(theta - theta.T).max() > 1e-10 or np.linalg.eigvalsh(theta)[0] < -1e-10:
            raise DegenerateInputError("theta must be symmetric positive semidefinite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class MethodSpec:
    """A named method: knockoff-highdim, knockoff-lowdim, or bh."""

    name: str
    kind: str
    cfg: PipelineConfig

    def __post_init__(self):
        if self.kind not in ("knockoff-highdim", "knockoff-lowdim", "bh"):
            raise ConfigError(f"unknown method kind {self.kind!r}")


@dataclass
class MethodSummary:
    name: str
    scorings: dict          # scoring name -> {metric: (mean, se)}
    n_trials: int
    n_failures: int
    sure_screen_rate: float


@dataclass
class ExperimentReport:
    methods: list
    trials: int
    config_echo: dict
    trial_rows: list = field(default_factory=list)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trial count must be >= 1")


def gen_ar_design(n: int, p: int, rho: float, seed: int = 0) -> Design:
    """Rows i.i.d. N(0, Sigma) with Sigma_jk = rho^|j-k| via the AR(1)
    recursion, columns normalized to unit norm."""
    if not 0.0 <= rho < 1.0:
        raise ConfigError(f"rho must be in [0, 1), got {rho}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, p))
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        x[:, j] = rho * x[:, j - 1] + scale * z[:, j]
    return normalize_columns(Design.from_matrix(x))


def gen_general_gaussian_design(spec: DesignSpec, seed: int = 0) -> Design:
    """Rows i.i.d. N(nu, psi), columns normalized."""
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(spec.psi)
    x = rng.standard_normal((spec.n, spec.p)) @ chol.T
    if spec.nu is not None:
        x = x + spec.nu
    return normalize_columns(Design.from_matrix(x))


def gen_design(spec: DesignSpec, seed: int = 0) -> Design:
    if spec.kind == "ar":
        return gen_ar_design(spec.n, spec.p, spec.rho, seed=seed)
    return gen_general_gaussian_design(spec, seed=seed)


def gen_coefficients(spec: CoefSpec, p: int) -> LinearModelSpec:
    """k0 strong coordinates at +/- strong_amp (random signs), k1 disjoint
    weak coordinates drawn N(0, weak_sd), sigma left at 1 by the caller."""
    if spec.k0 + spec.k1 > p:
        raise ConfigError(f"k0 + k1 = {spec.k0 + spec.k1} exceeds p = {p}")
    rng = np.random.default_rng(spec.seed)
    locs = rng.choice(p, size=spec.k0 + spec.k1, replace=False)
    beta = np.zeros(p)
    strong = locs[:spec.k0]
    weak = locs[spec.k0:]
    beta[strong] = spec.strong_amp * rng.choice([-1.0, 1.0], size=spec.k0)
    beta[weak] = spec.weak_sd * rng.standard_normal(spec.k1)
    return LinearModelSpec(beta=beta, sigma=1.0)


def strong_signal_set(spec: CoefSpec, p: int) -> frozenset:
    """The strong-signal coordinate set implied by gen_coefficients(spec, p)."""
    rng = np.random.default_rng(spec.seed)
    locs = rng.choice(p, size=spec.k0 + spec.k1, replace=False)
    return frozenset(int(j) for j in locs[:spec.k0])


def gen_response(X: Design, beta: np.ndarray, sigma: float, seed: int = 0) -> Response:
    """y = X beta + sigma * z with standard normal z."""
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    if beta.shape[0] != X.p:
        raise DimensionError(f"beta has length {beta.shape[0]}, design has p={X.p}")
    rng = np.random.default_rng(seed)
    return Response(values=X.values @ beta + sigma * rng.standard_normal(X.n))


def exchangeability_matrix_residual(pair, sigma: float) -> float:
    """Max deviation of [X Xt]^T Theta [X Xt] (Theta = sigma^2 I) from the
    pairwise exchangeability pattern M_{j,k} = M_{j,k+p} = M_{j+p,k} =
    M_{j+p,k+p} off-diagonal, M_{j,j} = M_{j+p,j+p} on-diagonal."""
    A = np.hstack([pair.X.values, pair.X_tilde.values])
    M = sigma * sigma * (A.T @ A)
    p = pair.p
    blocks = (M[:p, :p], M[:p, p:], M[p:, :p], M[p:, p:])
    worst = 0.0
    ref = blocks[0]
    for b in blocks[1:]:
        d = np.abs(b - ref)
        np.fill_diagonal(d, 0.0)
        worst = max(worst, float(d.max()))
    worst = max(worst, float(np.abs(np.diag(blocks[0]) - np.diag(blocks[3])).max()))
    return worst


def _run_method(method: MethodSpec, X: Design, y: Response, truth: LinearModelSpec,
                mu: np.ndarray, trial_seed: int):
    cfg = replace(method.cfg, seed=trial_seed)
    if method.kind == "knockoff-lowdim":
        sel = knockoff_filter_lowdim(X, y, cfg.q, statistic=cfg.statistic,
                                     plus=cfg.plus, seed=trial_seed, cfg=cfg)
        return sel, None, None
    if method.kind == "knockoff-highdim":
        res = knockoff_filter_highdim(X, y, cfg, mu=mu)
    else:
        res = bh_baseline(X, y, cfg, mu=mu)
    return res.selection, res.screen, res.model_ref


def _trial_worker(args):
    (trial, X, truth, mu, methods, master_seed, strong) = args
    seed_seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,))
    child_seeds = seed_seq.generate_state(2)
    y = gen_response(X, truth.beta, truth.sigma, seed=int(child_seeds[0]))
    rows = []
    for method in methods:
        try:
            sel, screen, model_ref = _run_method(method, X, y, truth, mu,
                                                 int(child_seeds[1]))
        except Exception as exc:  # per-trial failures are recorded, not dropped
            rows.append({"trial": trial, "method": method.name, "error": repr(exc)})
            continue
        full = score_trial(sel.selected, sel.signs, truth, method.cfg.q,
                           strong_set=strong)
        reduced = None
        if model_ref is not None and model_ref.beta_partial is not None:
            ts = np.zeros(truth.p)
            for k, j in enumerate(model_ref.s0):
                ts[j] = np.sign(model_ref.beta_partial[k])
            reduced = score_trial(sel.selected, sel.signs, truth, method.cfg.q,
                                  true_signs=ts, strong_set=strong)
        sure = None
        if screen is not None:
            n1 = X.n - method.cfg.n0
            sure = int(truth.support <= set(screen.s0) and len(screen.s0) <= n1 / 2)
        rows.append({"trial": trial, "method": method.name, "full": full,
                     "reduced": reduced, "sure_screen": sure,
                     "n_selected": full.n_selected})
    return rows


_SCORE_FIELDS = ("fdp", "fdp_dir", "mfdr_dir_summand", "power", "restricted_power",
                 "n_selected")


def run_experiment(design_spec: DesignSpec, coef_spec: CoefSpec, methods: list,
                   trials: int, master_seed: int = 0, sigma: float = 1.0,
                   threads: int = 1) -> ExperimentReport:
    """Fix X and beta once, then per trial redraw the noise, run every
    method on identical data, and aggregate scores.

    Per-trial failures are recorded with their exception and excluded from
    the aggregates, never silently dropped.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    setup_seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(0xD1F,))
    xs, cs = setup_seq.generate_state(2)
    X = gen_design(design_spec, seed=int(xs))
    coef_spec = replace(coef_spec, seed=int(cs))
    truth0 = gen_coefficients(coef_spec, design_spec.p)
    truth = LinearModelSpec(beta=truth0.beta, sigma=sigma)
    strong = strong_signal_set(coef_spec, design_spec.p)
    mu = X.values @ truth.beta

    args = [(t, X, truth, mu, methods, master_seed, strong) for t in range(trials)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(_trial_worker, args))
    else:
        per_trial = [_trial_worker(a) for a in args]

    trial_rows = [row for rows in per_trial for row in rows]  # ordered by trial
    summaries = []
    for method in methods:
        rows = [r for r in trial_rows if r["method"] == method.name]
        ok = [r for r in rows if "error" not in r]
        failures = len(rows) - len(ok)
        scorings = {}
        for scoring in ("full", "reduced"):
            scored = [r[scoring] for r in ok if r.get(scoring) is not None]
            if not scored:
                continue
            scorings[scoring] = {f: mean_and_se(getattr(s, f) for s in scored)
                                 for f in _SCORE_FIELDS}
        sure_vals = [r["sure_screen"] for r in ok if r.get("sure_screen") is not None]
        sure_rate = float(np.mean(sure_vals)) if sure_vals else float("nan")
        summaries.append(MethodSummary(name=method.name, scorings=scorings,
                                       n_trials=len(ok), n_failures=failures,
                                       sure_screen_rate=sure_rate))
    echo = {"design": design_spec, "coef": coef_spec, "trials": trials,
            "master_seed": master_seed, "sigma": sigma}
    return ExperimentReport(methods=summaries, trials=trials, config_echo=echo,
                            trial_rows=trial_rows)
