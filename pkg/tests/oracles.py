"""Independent reference computations used by the tests.

These deliberately avoid the package's solver path: the lasso oracle
enumerates sign patterns and solves each candidate's stationarity
system directly, which is exact for small p.
"""

import itertools

import numpy as np


def lasso_oracle_objective(X, y, lam, weights=None):
    """Minimum of 0.5*||y - Xb||^2 + lam*sum w|b| by sign enumeration.

    Feasible only for small p (3^p patterns).  For each sign vector s,
    the active coefficients solve X_A'X_A b = X_A'y - lam*(w*s)_A; a
    pattern is admissible when the solved signs agree with s and the
    inactive gradients satisfy |X_j'r| <= lam*w_j.  The best admissible
    objective is the global minimum of the convex problem.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    best = None
    for signs in itertools.product((-1.0, 0.0, 1.0), repeat=p):
        s = np.array(signs)
        active = s != 0.0
        beta = np.zeros(p)
        if active.any():
            XA = X[:, active]
            gram = XA.T @ XA
            rhs = XA.T @ y - lam * (w[active] * s[active])
            try:
                bA = np.linalg.solve(gram, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(np.sign(bA) != s[active]):
                continue
            beta[active] = bA
        r = y - X @ beta
        grad = X.T @ r
        if np.any(np.abs(grad[~active]) > lam * w[~active] + 1e-9):
            continue
        obj = 0.5 * float(r @ r) + lam * float(np.sum(w * np.abs(beta)))
        if best is None or obj < best:
            best = obj
    assert best is not None, "no admissible sign pattern; not a valid instance"
    return best


def orthonormal_lasso(X, y, lam, weights=None):
    """Closed-form solution when the columns of X are orthonormal."""
    p = X.shape[1]
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    z = X.T @ y
    return np.sign(z) * np.maximum(np.abs(z) - lam * w, 0.0)


def intercept_only_cv_mae(y, fold_of):
    """Held-out MAE of the intercept-only model under a fold assignment."""
    y = np.asarray(y, dtype=float)
    errors = np.empty_like(y)
    for k in np.unique(fold_of):
        test = fold_of == k
        errors[test] = np.abs(y[test] - y[~test].mean())
    return float(errors.mean())
