"""Knockoff construction and recycled knockoff assembly.

A knockoff copy of a normalized design X reproduces the Gram matrix of X
and all cross-correlations except each feature's own, which drops by s_j:

    [X Xt]^T [X Xt] = [[S, S - diag(s)], [S - diag(s), S]],  S = X^T X.

Only the equicorrelated choice of s is implemented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError
from .model import Design

GRAM_TOL = 1e-8
PSD_TOL = -1e-10
S_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class KnockoffPair:
    """Original design, knockoff design, decorrelation vector s, and the
    realized augmented Gram matrix [X Xt]^T [X Xt]."""

    X: Design
    X_tilde: Design
    s: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64).reshape(-1)
        gram = np.asarray(self.gram, dtype=np.float64)
        s.setflags(write=False)
        gram.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "gram", gram)
        p = self.X.p
        if self.X_tilde.values.shape != self.X.values.shape:
            raise DimensionError("knockoff matrix shape differs from the original design")
        if s.shape != (p,) or gram.shape != (2 * p, 2 * p):
            raise DimensionError("s or gram has the wrong shape for this design")

    @property
    def p(self) -> int:
        return self.X.p

    def gram_residuals(self) -> dict:
        """Max-norm residuals of the four Gram identities, computed from the
        stored augmented Gram blocks (the oracle recomputes them from the
        matrices directly)."""
        p = self.p
        sigma = self.gram[:p, :p]
        cross = self.gram[:p, p:]
        sigma_t = self.gram[p:, p:]
        ds = np.diag(self.s)
        same = np.abs(sigma - sigma_t).max()
        off = np.abs(cross - (sigma - ds)).max()
        # (X - Xt)^T (X - Xt) = S - C - C^T + S_t, target 2 diag(s)
        diff_gram = sigma - cross - cross.T + sigma_t
        diff = np.abs(diff_gram - 2.0 * ds).max()
        # (X - Xt)^T (X + Xt) = S + C - C^T - S_t, target 0
        mixed = np.abs(sigma + cross - cross.T - sigma_t).max()
        return {"same_gram": float(same), "cross_gram": float(off),
                "diff_gram": float(diff), "mixed_gram": float(mixed)}


def equicorrelated_s(gram_p: np.ndarray) -> np.ndarray:
    """Uniform decorrelation vector s_j = min(2 * lambda_min(Gram), 1).

    Requires a symmetric positive definite Gram with unit diagonal
    (normalized columns).
    """
    G = np.asarray(gram_p, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionError("gram matrix must be square")
    eigvals = np.linalg.eigvalsh(G)
    lam_min = float(eigvals[0])
    if lam_min <= 0.0:
        raise DegenerateInputError(
            f"gram matrix is not positive definite (lambda_min={lam_min:g})"
        )
    return np.full(G.shape[0], min(2.0 * lam_min, 1.0))


def _orthonormal_complement(X: np.ndarray, seed) -> np.ndarray:
    """A seeded n x p orthonormal basis orthogonal to the column span of X.

    QR of [X | G] for a seeded Gaussian block G; the p columns of Q beyond
    the span of X form the complement. The complement is not unique for
    n > 2p; we fix a deterministic seeded choice.
    """
    n, p = X.shape
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, p))
    Q, _ = np.linalg.qr(np.hstack([X, G]))
    return Q[:, p:2 * p]


def construct_knockoffs(X: Design, s: np.ndarray, seed: int = 0) -> KnockoffPair:
    """Build knockoffs Xt = X (I - S^{-1} diag(s)) + U C for normalized X.

    U is an orthonormal basis of a subspace orthogonal to the columns of X
    and C^T C = 2 diag(s) - diag(s) S^{-1} diag(s), factored by
    eigendecomposition with small negative eigenvalues clamped to zero.
    Deterministic given the seed.
    """
    if not X.normalized:
        raise DegenerateInputError("knockoff construction requires a normalized design")
    vals = X.values
    n, p = vals.shape
    s = np.asarray(s, dtype=np.float64).reshape(-1)
    if s.shape != (p,):
        raise DimensionError(f"s has length {s.shape[0]}, expected {p}")
    if (s < 0).any():
        raise DegenerateInputError("s must be nonnegative")
    if n < 2 * p:
        raise DimensionError(
            f"knockoff construction needs n >= 2p (got n={n}, p={p}); screen first"
        )
    sigma = vals.T @ vals
    try:
        sigma_inv_ds = np.linalg.solve(sigma, np.diag(s))
    except np.linalg.LinAlgError as exc:
        raise DegenerateInputError("X^T X is singular") from exc
    residual_gram = 2.0 * np.diag(s) - np.diag(s) @ sigma_inv_ds
    residual_gram = 0.5 * (residual_gram + residual_gram.T)
    w, V = np.linalg.eigh(residual_gram)
    if w.min(initial=0.0) < PSD_TOL:
        raise DegenerateInputError(
            f"2 diag(s) - diag(s) S^-1 diag(s) is not PSD (min eigenvalue {w.min():g})"
        )
    C = np.diag(np.sqrt(np.clip(w, 0.0, None))) @ V.T
    U = _orthonormal_complement(vals, seed)
    x_tilde = vals @ (np.eye(p) - sigma_inv_ds) + U @ C
    aug = np.hstack([vals, x_tilde])
    gram = aug.T @ aug
    xt_design = Design(values=x_tilde,
                       column_norms=np.linalg.norm(x_tilde, axis=0),
                       normalized=False)
    pair = KnockoffPair(X=X, X_tilde=xt_design, s=s, gram=gram)
    worst = max(pair.gram_residuals().values())
    if worst > GRAM_TOL:
        raise DegenerateInputError(
            f"constructed knockoffs violate the Gram contract (residual {worst:g})"
        )
    return pair


def recycle_knockoffs(X_full_screened: Design, X_tilde_part1: Design, n0: int) -> Design:
    """Stack the first n0 original rows on top of the part-1 knockoff rows.

    On the screening rows knockoffs are exact copies of the originals; only
    the inference rows carry genuine knockoffs.
    """
    full = X_full_screened.values
    tilde = X_tilde_part1.values
    n = full.shape[0]
    n1 = tilde.shape[0]
    if n0 < 0 or n0 + n1 != n:
        raise DimensionError(f"row counts do not match: n={n}, n0={n0}, n1={n1}")
    if full.shape[1] != tilde.shape[1]:
        raise DimensionError("column counts differ between original and knockoff parts")
    stacked = np.vstack([full[:n0], tilde])
    return Design(values=stacked, column_norms=np.linalg.norm(stacked, axis=0),
                  normalized=False)
