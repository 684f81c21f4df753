"""Data splitting (by rows or random rotation), marginal pre-screening, and
lasso-path screening with entry-sign recording."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError
from .model import Design, Response, SplitData
from .solvers import lasso_path

ORTHONORMAL_TOL = 1e-8


@dataclass(frozen=True)
class ScreenResult:
    """Screened feature set (original indexing) with recorded entry signs."""

    s0: tuple
    signs0: dict
    k_max: int

    def __post_init__(self):
        object.__setattr__(self, "s0", tuple(self.s0))
        object.__setattr__(self, "signs0", dict(self.signs0))
        if len(self.s0) > self.k_max:
            raise DimensionError(f"screened set of size {len(self.s0)} exceeds k_max={self.k_max}")
        if set(self.signs0) != set(self.s0):
            raise DimensionError("signs0 must be defined exactly on s0")


@dataclass(frozen=True)
class RotationSplit:
    """An n x n orthonormal rotation and the screening-part size."""

    U: np.ndarray
    n0: int = 0

    def __post_init__(self):
        U = np.asarray(self.U, dtype=np.float64)
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        n = U.shape[0]
        if U.shape != (n, n):
            raise DimensionError("rotation must be square")
        if np.abs(U.T @ U - np.eye(n)).max() > ORTHONORMAL_TOL:
            raise DegenerateInputError("rotation matrix is not orthonormal")


def _split_by_rows(X: Design, y: Response, idx0: np.ndarray, idx1: np.ndarray) -> SplitData:
    def part(idx):
        vals = X.values[idx]
        d = Design(values=vals, column_norms=np.linalg.norm(vals, axis=0), normalized=False)
        return d, Response(values=y.values[idx])
    return SplitData(part0=part(idx0), part1=part(idx1), n0=len(idx0), n1=len(idx1))


def split_rows(X: Design, y: Response, n0: int, seed: int = 0) -> SplitData:
    """Uniformly random (seeded) disjoint partition into n0 and n - n0 rows."""
    n = X.n
    if not 1 <= n0 < n:
        raise DimensionError(f"n0 must be in [1, {n - 1}], got {n0}")
    if y.n != n:
        raise DimensionError("design and response row counts differ")
    perm = np.random.default_rng(seed).permutation(n)
    return _split_by_rows(X, y, np.sort(perm[:n0]), np.sort(perm[n0:]))


def random_rotation(n: int, seed: int = 0) -> RotationSplit:
    """Seeded orthonormal n x n matrix from QR of a standard Gaussian draw."""
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    # fix the sign convention so the factorization is unique
    Q = Q * np.sign(np.diag(R))
    return RotationSplit(U=Q)


def rotate_then_split(X: Design, y: Response, n0: int, seed: int = 0) -> SplitData:
    """Rotate (X, y) by a seeded orthonormal U, then split by leading rows.

    The implied model coefficients are unchanged: rotating rows preserves
    the column Gram matrix and the Gaussian error law.
    """
    n = X.n
    if not 1 <= n0 < n:
        raise DimensionError(f"n0 must be in [1, {n - 1}], got {n0}")
    if y.n != n:
        raise DimensionError("design and response row counts differ")
    U = random_rotation(n, seed).U
    xr = U @ X.values
    yr = U @ y.values
    Xr = Design(values=xr, column_norms=np.linalg.norm(xr, axis=0), normalized=False)
    return _split_by_rows(Xr, Response(values=yr), np.arange(n0), np.arange(n0, n))


def marginal_prescreen(X0: Design, y0: Response, m: int) -> np.ndarray:
    """Indices of the m largest |X_j^T y0|, ties broken by lower index."""
    p = X0.p
    if not 1 <= m <= p:
        raise DimensionError(f"m must be in [1, {p}], got {m}")
    corr = np.abs(X0.values.T @ y0.values)
    order = np.lexsort((np.arange(p), -corr))
    return np.sort(order[:m])


def lasso_screen(X0: Design, y0: Response, k_max: int,
                 grid_size: int = 200, lambda_min_ratio: float = 1e-3) -> ScreenResult:
    """First k_max features to enter the lasso path on the screening data,
    with the sign each carried when it first entered. Returns fewer than
    k_max if fewer ever become active on the grid."""
    if k_max < 1:
        raise DimensionError(f"k_max must be >= 1, got {k_max}")
    path = lasso_path(X0, y0, grid_size=grid_size, lambda_min_ratio=lambda_min_ratio,
                      stop_after=k_max)
    chosen = list(path.entry_order[:k_max])
    signs = {int(j): int(path.entry_sign[j]) for j in chosen}
    return ScreenResult(s0=tuple(int(j) for j in chosen), signs0=signs, k_max=k_max)
