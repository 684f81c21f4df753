"""Penalized and unpenalized least-squares engines.

Lasso and the lasso entry path run on a cyclic coordinate-descent kernel
with optional per-coordinate sign restrictions; the square-root lasso is
solved by iterating a noise-adaptive lasso penalty to a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._cd import cd_lasso, cd_lasso_path
from .errors import ConvergenceError, DegenerateInputError, DimensionError, SingularDesignError
from .model import Design

DEFAULT_GRID_SIZE = 200
DEFAULT_LAMBDA_MIN_RATIO = 1e-3
SQRT_LASSO_REL_TOL = 1e-6


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, Design):
        return X.values
    return np.atleast_2d(np.asarray(X, dtype=np.float64))


def _as_vector(y) -> np.ndarray:
    vals = getattr(y, "values", y)
    return np.asarray(vals, dtype=np.float64).reshape(-1)


@dataclass(frozen=True)
class SignConstraints:
    """Per-coordinate required signs: -1, 0 (free) or +1."""

    required_sign: np.ndarray

    def __post_init__(self):
        rs = np.asarray(self.required_sign, dtype=np.int8).reshape(-1)
        if not np.isin(rs, (-1, 0, 1)).all():
            raise DegenerateInputError("required_sign entries must be in {-1, 0, +1}")
        rs.setflags(write=False)
        object.__setattr__(self, "required_sign", rs)

    @classmethod
    def free(cls, m: int) -> "SignConstraints":
        return cls(required_sign=np.zeros(m, dtype=np.int8))


@dataclass(frozen=True)
class LassoConfig:
    lam: float
    max_iters: int = 100_000
    tol: float = 1e-8

    def __post_init__(self):
        if self.lam < 0:
            raise DegenerateInputError(f"lambda must be nonnegative, got {self.lam}")
        if self.tol <= 0:
            raise DegenerateInputError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class EntryPath:
    """First-entry bookkeeping along a decreasing lambda grid.

    entry_lambda[j] is the largest grid value at which coordinate j was
    nonzero (0 if it never entered); entry_sign[j] is the coefficient sign
    at first entry; entry_order lists the entered coordinates by decreasing
    entry lambda, ties broken by larger absolute coefficient at entry, then
    lower index.
    """

    entry_lambda: np.ndarray
    entry_sign: np.ndarray
    entry_order: tuple

    def __post_init__(self):
        el = np.asarray(self.entry_lambda, dtype=np.float64)
        es = np.asarray(self.entry_sign, dtype=np.int8)
        if not np.array_equal(es == 0, el == 0.0):
            raise DegenerateInputError("entry_sign must be zero exactly where entry_lambda is zero")
        el.setflags(write=False)
        es.setflags(write=False)
        object.__setattr__(self, "entry_lambda", el)
        object.__setattr__(self, "entry_sign", es)
        object.__setattr__(self, "entry_order", tuple(self.entry_order))

    @property
    def m(self) -> int:
        return self.entry_lambda.shape[0]


def least_squares(X, y) -> np.ndarray:
    """Ordinary least squares via the normal equations (n >= p, full rank)."""
    A = _as_matrix(X)
    b = _as_vector(y)
    n, p = A.shape
    if b.shape[0] != n:
        raise DimensionError(f"response has {b.shape[0]} entries, design has {n} rows")
    if n < p:
        raise SingularDesignError(f"least squares needs n >= p, got n={n}, p={p}")
    gram = A.T @ A
    try:
        coef = np.linalg.solve(gram, A.T @ b)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("design is rank deficient") from exc
    if not np.isfinite(coef).all() or np.linalg.matrix_rank(A) < p:
        raise SingularDesignError("design is rank deficient")
    return coef


def _required_signs(constraints: SignConstraints | None, m: int) -> np.ndarray:
    if constraints is None:
        return np.zeros(m, dtype=np.int8)
    rs = constraints.required_sign
    if rs.shape[0] != m:
        raise DimensionError(f"constraints cover {rs.shape[0]} coordinates, design has {m}")
    return np.ascontiguousarray(rs)


def lasso(X, y, cfg: LassoConfig, constraints: SignConstraints | None = None,
          warm_start: np.ndarray | None = None) -> np.ndarray:
    """Solve the (sign-restricted) lasso by cyclic coordinate descent."""
    A = np.ascontiguousarray(_as_matrix(X))
    b = np.ascontiguousarray(_as_vector(y))
    n, p = A.shape
    if b.shape[0] != n:
        raise DimensionError(f"response has {b.shape[0]} entries, design has {n} rows")
    rs = _required_signs(constraints, p)
    coef = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=np.float64)
    res = cd_lasso(A, b, float(cfg.lam), coef, rs, cfg.max_iters, cfg.tol)
    if res < 0.0:
        raise ConvergenceError(
            f"lasso did not converge in {cfg.max_iters} sweeps (last max change {-res - 1.0:g})",
            last_change=-res - 1.0,
        )
    return coef


def lambda_grid(lam_max: float, grid_size: int, lambda_min_ratio: float) -> np.ndarray:
    if grid_size < 2:
        raise DegenerateInputError(f"grid_size must be >= 2, got {grid_size}")
    if not 0.0 < lambda_min_ratio < 1.0:
        raise DegenerateInputError(f"lambda_min_ratio must be in (0,1), got {lambda_min_ratio}")
    return lam_max * np.geomspace(1.0, lambda_min_ratio, grid_size)


def lasso_path(X, y, grid_size: int = DEFAULT_GRID_SIZE,
               lambda_min_ratio: float = DEFAULT_LAMBDA_MIN_RATIO,
               constraints: SignConstraints | None = None,
               max_iters: int = 100_000, tol: float = 1e-8,
               stop_after: int = 0) -> EntryPath:
    """Lasso entry path on a geometric lambda grid with warm starts.

    The grid runs from lam_max = ||X^T y||_inf down to lam_max *
    lambda_min_ratio; entry lambdas approximate true knots from below by at
    most one grid step. stop_after > 0 halts once that many coordinates
    have entered (used by screening).
    """
    A = np.ascontiguousarray(_as_matrix(X))
    b = np.ascontiguousarray(_as_vector(y))
    n, p = A.shape
    if b.shape[0] != n:
        raise DimensionError(f"response has {b.shape[0]} entries, design has {n} rows")
    rs = _required_signs(constraints, p)
    lam_max = float(np.abs(A.T @ b).max(initial=0.0))
    entry_lambda = np.zeros(p)
    entry_sign = np.zeros(p, dtype=np.int8)
    entry_mag = np.zeros(p)
    if lam_max == 0.0:
        return EntryPath(entry_lambda, entry_sign, ())
    lams = lambda_grid(lam_max, grid_size, lambda_min_ratio)
    coefs, status, k_done = cd_lasso_path(A, b, lams, rs, max_iters, tol, int(stop_after))
    if status < 0.0:
        k = int(-status) - 1
        raise ConvergenceError(f"lasso path failed to converge at grid point {k} (lambda={lams[k]:g})")
    for k in range(k_done):
        row = coefs[k]
        newly = np.flatnonzero((row != 0.0) & (entry_lambda == 0.0))
        if newly.size:
            entry_lambda[newly] = lams[k]
            entry_sign[newly] = np.sign(row[newly])
            entry_mag[newly] = np.abs(row[newly])
    entered = np.flatnonzero(entry_lambda > 0.0)
    # sort: decreasing entry lambda, then decreasing |coef| at entry, then index
    order = sorted(entered.tolist(), key=lambda j: (-entry_lambda[j], -entry_mag[j], j))
    return EntryPath(entry_lambda, entry_sign, tuple(order))


def sqrt_lasso_lambda(X, kappa: float, mc_reps: int = 500, seed: int = 0,
                      mode: str = "mean") -> float:
    """Monte Carlo penalty scale for the square-root lasso.

    Returns kappa * E[||X^T g||_inf / ||g||_2] over standard-Gaussian
    n-vectors g ("mean" mode), or kappa times the 95th percentile of the
    same ratio ("q95" mode).
    """
    if kappa < 0:
        raise DegenerateInputError(f"kappa must be nonnegative, got {kappa}")
    if mc_reps < 100:
        raise DegenerateInputError(f"mc_reps must be >= 100, got {mc_reps}")
    if kappa == 0.0:
        return 0.0
    A = _as_matrix(X)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((mc_reps, A.shape[0]))
    ratios = np.abs(g @ A).max(axis=1) / np.linalg.norm(g, axis=1)
    if mode == "mean":
        return float(kappa * ratios.mean())
    if mode == "q95":
        return float(kappa * np.quantile(ratios, 0.95))
    raise DegenerateInputError(f"unknown sqrt-lasso penalty mode {mode!r}")


def sqrt_lasso(X, y, kappa: float, constraints: SignConstraints | None = None,
               seed: int = 0, mc_reps: int = 500, max_outer: int = 200,
               max_iters: int = 100_000, tol: float = 1e-10,
               penalty_mode: str = "mean", lam_base: float | None = None) -> np.ndarray:
    """Square-root lasso: minimize ||y - Xb||_2 + lam * ||b||_1.

    Solved through the equivalence with a lasso whose penalty adapts to the
    residual norm: iterate lam_t = lam * ||y - X b_t||_2 until the
    effective penalty is stable to relative 1e-6. lam comes from
    sqrt_lasso_lambda with the given kappa, unless lam_base is supplied
    explicitly (the invariance harnesses pin it so the penalty does not
    pick up Monte Carlo noise across transformed reruns).
    """
    A = _as_matrix(X)
    b = _as_vector(y)
    ynorm = float(np.linalg.norm(b))
    if ynorm == 0.0:
        return np.zeros(A.shape[1])
    if lam_base is None:
        lam_base = sqrt_lasso_lambda(A, kappa, mc_reps=mc_reps, seed=seed, mode=penalty_mode)
    coef = np.zeros(A.shape[1])
    lam_prev = None
    for _ in range(max_outer):
        resid = b - A @ coef
        rnorm = float(np.linalg.norm(resid))
        if rnorm <= 1e-12 * ynorm:
            raise DegenerateInputError("square-root lasso hit a zero residual (interpolating fit)")
        lam_eff = lam_base * rnorm
        coef = lasso(A, b, LassoConfig(lam=lam_eff, max_iters=max_iters, tol=tol),
                     constraints=constraints, warm_start=coef)
        if lam_prev is not None and abs(lam_eff - lam_prev) <= SQRT_LASSO_REL_TOL * max(lam_prev, 1e-300):
            return coef
        lam_prev = lam_eff
    raise ConvergenceError(f"square-root lasso penalty did not stabilize in {max_outer} iterations")


def omp(X, y, k: int) -> list:
    """Orthogonal matching pursuit: greedy selection order of k features."""
    A = _as_matrix(X)
    b = _as_vector(y)
    n, p = A.shape
    if not 1 <= k <= p:
        raise DimensionError(f"k must be in [1, {p}], got {k}")
    selected: list[int] = []
    resid = b.copy()
    for _ in range(k):
        scores = np.abs(A.T @ resid)
        scores[selected] = -np.inf
        j = int(np.argmax(scores))
        selected.append(j)
        sub = A[:, selected]
        coef = least_squares(sub, b)
        resid = b - sub @ coef
    return selected
