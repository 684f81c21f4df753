"""Independent brute-force verifiers used by the test and acceptance suites.

Everything here recomputes its target quantity from first principles —
exact enumeration, direct dense multiplication, closed forms — on a code
path disjoint from the library implementation it checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .filter import stat_coef_diff, stat_lasso_entry
from .knockoffs import KnockoffPair
from .solvers import SignConstraints, lasso_path, sqrt_lasso, sqrt_lasso_lambda

MAX_ENUM_N = 16


@dataclass(frozen=True)
class BernoulliStoppingInstance:
    """Independent Bernoulli draws B_1..B_n with success probabilities rho,
    plus a reverse-time stopping rule.

    The rule is called as rule(j, partial_sum, tail) for j = n, n-1, ..., 1
    where partial_sum = B_1 + ... + B_j and tail = (B_{j+1}, ..., B_n); the
    stopping index is the largest j at which it returns True (0 if never).
    Rules built by the threshold_rule / fixed_stop_rule / knockoff_ratio_rule
    factories depend only on this allowed information by construction.
    """

    rho: tuple
    rho_floor: float
    stopping_rule: object

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        object.__setattr__(self, "rho", rho)
        if not rho or len(rho) > MAX_ENUM_N:
            raise ConfigError(f"need 1 <= n <= {MAX_ENUM_N}, got n={len(rho)}")
        if any(not 0.0 < r <= 1.0 for r in rho):
            raise ConfigError("every rho_i must lie in (0, 1]")
        if not 0.0 < self.rho_floor <= min(rho):
            raise ConfigError("rho_floor must be positive and <= min(rho)")

    @property
    def n(self) -> int:
        return len(self.rho)


def fixed_stop_rule(j0: int):
    """Stop exactly at index j0 (a deterministic, hence measurable, rule)."""
    return lambda j, partial_sum, tail: j == j0


def threshold_rule(stat_fn, level: float):
    """Stop at the largest j where stat_fn(j, partial_sum, tail) <= level."""
    return lambda j, partial_sum, tail: stat_fn(j, partial_sum, tail) <= level


def knockoff_ratio_rule(level: float):
    """Stop at the largest j where (1 + #failures among B_1..B_j) divided by
    max(#successes, 1) is at most the level — the shape of the selection
    threshold's stopping index."""
    return threshold_rule(
        lambda j, partial_sum, tail: (1 + j - partial_sum) / max(partial_sum, 1),
        level,
    )


def tail_count_rule(m: int):
    """Stop at the largest j with at least m successes in the tail."""
    return lambda j, partial_sum, tail: sum(tail) >= m


def stopping_ratio_exact(instance: BernoulliStoppingInstance) -> float:
    """Exact E[(1 + J) / (1 + B_1 + ... + B_J)] by enumerating all 2^n
    outcomes and applying the stopping rule in reverse time per outcome.

    J = 0 (rule never fires) contributes the value 1.
    """
    n = instance.n
    rho = instance.rho
    rule = instance.stopping_rule
    total = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        weight = 1.0
        for b, r in zip(bits, rho):
            weight *= r if b else 1.0 - r
        if weight == 0.0:
            continue
        partial = list(itertools.accumulate(bits))
        J, SJ = 0, 0
        for j in range(n, 0, -1):
            if rule(j, partial[j - 1], bits[j:]):
                J, SJ = j, partial[j - 1]
                break
        total += weight * (1 + J) / (1 + SJ)
    return total


def random_stopping_instance(rng: np.random.Generator, rho_floor: float,
                             n_max: int = 12) -> BernoulliStoppingInstance:
    """A randomized instance from the threshold rule family, for sweeps."""
    n = int(rng.integers(1, n_max + 1))
    rho = rho_floor + (1.0 - rho_floor) * rng.random(n)
    kind = int(rng.integers(3))
    if kind == 0:
        rule = fixed_stop_rule(int(rng.integers(1, n + 1)))
    elif kind == 1:
        rule = knockoff_ratio_rule(float(rng.uniform(0.1, 3.0)))
    else:
        rule = tail_count_rule(int(rng.integers(0, n + 1)))
    return BernoulliStoppingInstance(rho=tuple(rho), rho_floor=rho_floor,
                                     stopping_rule=rule)


@dataclass(frozen=True)
class GramReport:
    """Max residuals of the four knockoff Gram identities."""

    same_gram: float
    cross_gram: float
    diff_gram: float
    mixed_gram: float

    def __post_init__(self):
        for name in ("same_gram", "cross_gram", "diff_gram", "mixed_gram"):
            if getattr(self, name) < 0.0:
                raise DimensionError(f"{name} residual must be nonnegative")

    def worst(self) -> float:
        return max(self.same_gram, self.cross_gram, self.diff_gram, self.mixed_gram)


def gram_check(pair: KnockoffPair) -> GramReport:
    """Recompute the four Gram identities by direct dense multiplication of
    the stored matrices (independent of construction and of the cached
    augmented Gram)."""
    X = np.array(pair.X.values)
    Xt = np.array(pair.X_tilde.values)
    ds = np.diag(pair.s)
    sigma = X.T @ X
    return GramReport(
        same_gram=float(np.abs(Xt.T @ Xt - sigma).max()),
        cross_gram=float(np.abs(X.T @ Xt - (sigma - ds)).max()),
        diff_gram=float(np.abs((X - Xt).T @ (X - Xt) - 2.0 * ds).max()),
        mixed_gram=float(np.abs((X - Xt).T @ (X + Xt)).max()),
    )


def exchangeability_check(pair: KnockoffPair, theta: np.ndarray, tol: float = 1e-8) -> bool:
    """Check the pairwise exchangeability pattern of M = [X Xt]^T Theta [X Xt]:
    all four blocks agree entrywise off the diagonal and the two diagonal
    blocks share their diagonals."""
    A = np.hstack([pair.X.values, pair.X_tilde.values])
    M = A.T @ np.asarray(theta, dtype=np.float64) @ A
    p = pair.p
    blocks = (M[:p, :p], M[:p, p:], M[p:, :p], M[p:, p:])
    ref = blocks[0]
    for b in blocks[1:]:
        d = np.abs(b - ref)
        np.fill_diagonal(d, 0.0)
        if d.max() > tol:
            return False
    return bool(np.abs(np.diag(blocks[0]) - np.diag(blocks[3])).max() <= tol)


def _stat_on(statistic: str, X: np.ndarray, Xt: np.ndarray, y: np.ndarray,
             kappa: float = 0.7, seed: int = 0, lam_base: float | None = None):
    A = np.hstack([X, Xt])
    if statistic == "coef-diff":
        m = X.shape[1]
        beta = sqrt_lasso(A, y, kappa, seed=seed, lam_base=lam_base)
        return stat_coef_diff(beta[:m], beta[m:]).w
    if statistic in ("lasso-entry", "sqrt-lasso-entry"):
        return stat_lasso_entry(lasso_path(A, y)).w
    raise ConfigError(f"unsupported statistic {statistic!r} for the swap harness")


def swap_antisymmetry_check(statistic: str, X: np.ndarray, X_tilde: np.ndarray,
                            y: np.ndarray, swap, tol: float,
                            kappa: float = 0.7, seed: int = 0) -> bool:
    """Recompute W after swapping the columns in `swap` between X and its
    knockoff copy; pass iff W flips sign exactly on the swapped set and is
    unchanged otherwise, within tol.

    For coef-diff the penalty scale is computed once on the unswapped
    augmented design and reused: swapping a feature with its knockoff leaves
    the true penalty functional unchanged, so re-estimating it would only
    add Monte Carlo noise to an otherwise exact symmetry.
    """
    X = np.asarray(X, dtype=np.float64)
    Xt = np.asarray(X_tilde, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    swap = sorted(set(int(j) for j in swap))
    lam_base = None
    if statistic == "coef-diff":
        lam_base = sqrt_lasso_lambda(np.hstack([X, Xt]), kappa, seed=seed)
    w0 = _stat_on(statistic, X, Xt, y, kappa=kappa, seed=seed, lam_base=lam_base)
    Xs, Xts = np.array(X), np.array(Xt)
    for j in swap:
        Xs[:, j], Xts[:, j] = Xt[:, j].copy(), X[:, j].copy()
    w1 = _stat_on(statistic, Xs, Xts, y, kappa=kappa, seed=seed, lam_base=lam_base)
    expected = np.array(w0)
    expected[swap] *= -1.0
    return bool(np.abs(w1 - expected).max() <= tol)


def rotation_invariance_check(statistic: str, X: np.ndarray, X_tilde: np.ndarray,
                              y: np.ndarray, U: np.ndarray, tol: float,
                              kappa: float = 0.7, seed: int = 0) -> bool:
    """Check that W is unchanged when the rows of [X Xt] and y are jointly
    rotated by an orthonormal U (the statistic must depend on the data only
    through the augmented Gram and the augmented correlations with y)."""
    X = np.asarray(X, dtype=np.float64)
    Xt = np.asarray(X_tilde, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    lam_base = None
    if statistic == "coef-diff":
        lam_base = sqrt_lasso_lambda(np.hstack([X, Xt]), kappa, seed=seed)
    w0 = _stat_on(statistic, X, Xt, y, kappa=kappa, seed=seed, lam_base=lam_base)
    w1 = _stat_on(statistic, U @ X, U @ Xt, U @ y, kappa=kappa, seed=seed,
                  lam_base=lam_base)
    return bool(np.abs(w1 - w0).max() <= tol)


def scalar_lasso_oracle(x: np.ndarray, y: np.ndarray, lam: float) -> float:
    """Closed form for the one-column lasso with unit-norm x:
    soft(x^T y, lam)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if abs(float(x @ x) - 1.0) > 1e-10:
        raise DimensionError("scalar oracle requires a unit-norm column")
    inner = float(x @ y)
    return float(np.sign(inner) * max(abs(inner) - lam, 0.0))


def lasso_kkt_residual(X: np.ndarray, y: np.ndarray, beta: np.ndarray, lam: float,
                       constraints: SignConstraints | None = None) -> float:
    """Max violation of the lasso KKT conditions at beta.

    Active coordinates need gradient = lam * sign(beta_j); inactive free
    coordinates need |gradient| <= lam; a sign-constrained inactive
    coordinate only needs the one-sided condition in its allowed direction.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    grad = X.T @ (y - X @ beta)
    req = (np.zeros(beta.shape[0], dtype=np.int8) if constraints is None
           else constraints.required_sign)
    worst = 0.0
    for j in range(beta.shape[0]):
        if beta[j] != 0.0:
            worst = max(worst, abs(grad[j] - lam * np.sign(beta[j])))
        elif req[j] == 0:
            worst = max(worst, max(abs(grad[j]) - lam, 0.0))
        else:
            worst = max(worst, max(req[j] * grad[j] - lam, 0.0))
    return float(worst)
