"""Core numeric data types: designs, responses, ground-truth models, splits.

All types are immutable after construction (arrays are marked read-only)
and safe to share across parallel workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DimensionError

UNIT_NORM_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Design:
    """A dense n x p design matrix with per-column scale bookkeeping.

    ``column_norms`` records the pre-normalization Euclidean column norms
    (all ones for a matrix that was already unit-norm). When ``normalized``
    is True every column must have unit norm to within 1e-10.
    """

    values: np.ndarray
    column_norms: np.ndarray
    normalized: bool

    def __post_init__(self):
        vals = _readonly(np.atleast_2d(self.values))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "column_norms", _readonly(self.column_norms))
        n, p = vals.shape
        if n < 1 or p < 1:
            raise DimensionError(f"design must have n >= 1 and p >= 1, got {n} x {p}")
        if self.column_norms.shape != (p,):
            raise DimensionError(
                f"column_norms has length {self.column_norms.shape[0]}, expected {p}"
            )
        if self.normalized:
            norms = np.linalg.norm(vals, axis=0)
            bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
            if bad.size:
                raise DegenerateInputError(
                    f"design marked normalized but column {bad[0]} has norm {norms[bad[0]]!r}"
                )

    @classmethod
    def from_matrix(cls, values: np.ndarray) -> "Design":
        """Wrap a raw matrix, recording its column norms, without rescaling."""
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        norms = np.linalg.norm(values, axis=0)
        return cls(values=values, column_norms=norms, normalized=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Response:
    """A length-n response vector."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "values", _readonly(vals))
        if vals.shape[0] < 1:
            raise DimensionError("response must have at least one entry")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class LinearModelSpec:
    """Ground-truth coefficients and noise level for simulation/scoring."""

    beta: np.ndarray
    sigma: float
    support: frozenset = field(init=False)

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "beta", _readonly(beta))
        if self.sigma < 0:
            raise DegenerateInputError(f"sigma must be nonnegative, got {self.sigma}")
        object.__setattr__(self, "support", frozenset(np.flatnonzero(beta).tolist()))

    @property
    def p(self) -> int:
        return self.beta.shape[0]

    def true_signs(self) -> np.ndarray:
        """Per-feature signs in {-1, 0, +1}, with sign(0) = 0."""
        return np.sign(self.beta).astype(np.int64)


@dataclass(frozen=True)
class SplitData:
    """A disjoint two-part row split of a (Design, Response) pair."""

    part0: tuple
    part1: tuple
    n0: int
    n1: int

    def __post_init__(self):
        x0, y0 = self.part0
        x1, y1 = self.part1
        if x0.n != self.n0 or y0.n != self.n0:
            raise DimensionError(f"part0 has {x0.n} rows, expected n0={self.n0}")
        if x1.n != self.n1 or y1.n != self.n1:
            raise DimensionError(f"part1 has {x1.n} rows, expected n1={self.n1}")
        if x0.p != x1.p:
            raise DimensionError("split parts disagree on feature count")


def normalize_columns(X: Design) -> Design:
    """Rescale every column of X to unit Euclidean norm.

    Zero columns are an error: silently dropping them would corrupt index
    bookkeeping downstream, and screening should have removed constant
    features already.
    """
    vals = X.values
    norms = np.linalg.norm(vals, axis=0)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateInputError(f"column {zero[0]} of the design is identically zero")
    return Design(values=vals / norms, column_norms=norms, normalized=True)


def _parse_numeric_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DegenerateInputError(
                        f"{path}: malformed cell at row {i + 1}, column {j + 1}: {cell!r}"
                    ) from None
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise DegenerateInputError(
                    f"{path}: row {i + 1} has {len(parsed)} cells, expected {width}"
                )
            rows.append(parsed)
    if not rows:
        raise DegenerateInputError(f"{path}: empty CSV")
    return np.asarray(rows, dtype=np.float64)


def load_design_csv(path) -> Design:
    """Read a headerless numeric CSV (rows = observations) as a Design."""
    return Design.from_matrix(_parse_numeric_csv(path))


def load_response_csv(path) -> Response:
    """Read a single-column numeric CSV as a Response."""
    data = _parse_numeric_csv(path)
    if data.shape[1] != 1:
        raise DegenerateInputError(f"{path}: response CSV must have one column, got {data.shape[1]}")
    return Response(values=data[:, 0])
