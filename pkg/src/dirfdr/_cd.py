"""Numba coordinate-descent kernels for the (sign-restricted) Lasso.

Kept free of package imports so the jitted functions stay cacheable.
Coordinates with ``required_sign[j] != 0`` are projected onto their
allowed half-line after each soft-threshold update; for a 1-d convex
subproblem this projection is the exact constrained minimizer.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def cd_lasso(X, y, lam, b, required_sign, max_iters, tol):
    """Cyclic coordinate descent on 0.5*||y - Xb||^2 + lam*||b||_1.

    Updates ``b`` in place. Returns the max coordinate change of the final
    sweep (<= tol on convergence) or -last_change - 1.0 when the iteration
    budget is exhausted (caller raises).
    """
    n, p = X.shape
    col_sq = np.empty(p)
    for j in range(p):
        acc = 0.0
        for i in range(n):
            acc += X[i, j] * X[i, j]
        col_sq[j] = acc

    r = y.copy()
    for j in range(p):
        bj = b[j]
        if bj != 0.0:
            for i in range(n):
                r[i] -= bj * X[i, j]

    last = 0.0
    for _ in range(max_iters):
        last = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            bj = b[j]
            z = 0.0
            for i in range(n):
                z += X[i, j] * r[i]
            z += col_sq[j] * bj
            if z > lam:
                u = (z - lam) / col_sq[j]
            elif z < -lam:
                u = (z + lam) / col_sq[j]
            else:
                u = 0.0
            s = required_sign[j]
            if s > 0 and u < 0.0:
                u = 0.0
            elif s < 0 and u > 0.0:
                u = 0.0
            if u != bj:
                d = u - bj
                for i in range(n):
                    r[i] -= d * X[i, j]
                b[j] = u
                ad = abs(d)
                if ad > last:
                    last = ad
        if last <= tol:
            return last
    return -last - 1.0


@njit(cache=True, nogil=True)
def cd_lasso_path(X, y, lams, required_sign, max_iters, tol, stop_after):
    """Warm-started coordinate descent down a decreasing lambda grid.

    Returns (coefs, status, k_done): coefs has shape (len(lams), p), status
    is 0.0 on success or -(grid index) - 1.0 for the first grid point that
    failed to converge, and k_done counts computed grid points. When
    stop_after > 0 the descent halts once that many distinct coordinates
    have been active at some grid point.
    """
    p = X.shape[1]
    g = lams.shape[0]
    coefs = np.zeros((g, p))
    b = np.zeros(p)
    entered = np.zeros(p, dtype=np.uint8)
    n_entered = 0
    for k in range(g):
        res = cd_lasso(X, y, lams[k], b, required_sign, max_iters, tol)
        if res < 0.0:
            return coefs, -float(k) - 1.0, k
        coefs[k, :] = b
        for j in range(p):
            if b[j] != 0.0 and entered[j] == 0:
                entered[j] = 1
                n_entered += 1
        if stop_after > 0 and n_entered >= stop_after:
            return coefs, 0.0, k + 1
    return coefs, 0.0, g
