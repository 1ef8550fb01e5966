"""Pure-numpy coordinate descent, the fallback for the compiled kernel.

Mirrors ``_cd_fast`` update for update: cyclic sweeps over all columns
alternate with sweeps restricted to the currently active set, and a
lambda value counts as converged only once a *full* sweep moves no
coefficient by ``tol`` or more.  Results agree with the compiled kernel
to floating-point roundoff; this module exists so the package works
without a C toolchain and as a reference for the compiled code.
"""

from __future__ import annotations

import numpy as np


def _sweep(X, r, beta, weights, col_ss, lam, idx):
    """One pass of coordinate updates over ``idx``; returns the max |change|."""
    max_change = 0.0
    for j in idx:
        ss = col_ss[j]
        if ss == 0.0:
            continue
        b_old = beta[j]
        z = X[:, j] @ r + ss * b_old
        w = weights[j]
        if w > 0.0:
            t = lam * w
            if z > t:
                b_new = (z - t) / ss
            elif z < -t:
                b_new = (z + t) / ss
            else:
                b_new = 0.0
        else:
            # Unpenalized coordinate: plain least-squares step.
            b_new = z / ss
        if b_new != b_old:
            r += (b_old - b_new) * X[:, j]
            beta[j] = b_new
            change = abs(b_new - b_old)
            if change > max_change:
                max_change = change
    return max_change


def _solve(X, r, beta, weights, col_ss, lam, tol, max_iter):
    """Run sweeps at one lambda until a full sweep changes nothing by >= tol."""
    p = beta.shape[0]
    full = np.arange(p)
    sweeps = 0
    converged = False
    while sweeps < max_iter:
        max_change = _sweep(X, r, beta, weights, col_ss, lam, full)
        sweeps += 1
        if max_change < tol:
            converged = True
            break
        if sweeps >= max_iter:
            break
        # Iterate on the active set (nonzero or unpenalized coordinates)
        # before paying for another full pass.
        active = np.flatnonzero((beta != 0.0) | (weights == 0.0))
        while sweeps < max_iter:
            change = _sweep(X, r, beta, weights, col_ss, lam, active)
            sweeps += 1
            if change < tol:
                break
    return sweeps, converged


def cd_path(X, y, weights, lams, tol, max_iter):
    """Weighted-lasso coordinate descent along a descending lambda path.

    Parameters mirror the compiled kernel: ``X`` is an (n, p) float64
    design (Fortran order preferred), ``weights`` per-column penalty
    factors (0 = unpenalized), ``lams`` the lambda values fitted in the
    given order with warm starts.  Returns ``(coefs, sweeps, converged)``
    where ``coefs`` has shape (len(lams), p).
    """
    X = np.asfortranarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    lams = np.ascontiguousarray(lams, dtype=np.float64)
    n, p = X.shape
    n_lam = lams.shape[0]

    col_ss = np.einsum("ij,ij->j", X, X)
    beta = np.zeros(p)
    r = y.copy()
    coefs = np.zeros((n_lam, p))
    sweeps_out = np.zeros(n_lam, dtype=np.int64)
    conv_out = np.zeros(n_lam, dtype=bool)
    for idx, lam in enumerate(lams):
        sweeps, converged = _solve(X, r, beta, weights, col_ss, lam, tol, max_iter)
        coefs[idx] = beta
        sweeps_out[idx] = sweeps
        conv_out[idx] = converged
    return coefs, sweeps_out, conv_out
