"""Standardization, the weighted-lasso solver, and optimality checks.

The solver minimizes

    0.5 * ||y - X b||^2 + lam * sum_j w_j * |b_j|

by cyclic coordinate descent.  There is no 1/n factor on the quadratic
term, so ``lambda_max`` as computed here is exactly the smallest penalty
at which every penalized coefficient is zero.  Columns with weight zero
are never shrunk; they always satisfy the unpenalized stationarity
condition at a converged solution.

All operations are pure functions of their inputs and safe to share
across threads; fitted values are never mutated after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import cd_path

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000


class ConstantColumnError(ValueError):
    """A predictor column has zero variance and cannot be standardized."""

    def __init__(self, names):
        self.names = tuple(names)
        super().__init__("constant column(s): " + ", ".join(self.names))


@dataclass(frozen=True)
class Dataset:
    """Response vector plus a named predictor matrix.

    Attributes:
        y: Response, shape (n,).
        X: Predictors, shape (n, p).
        names: One unique label per predictor column.
    """

    y: np.ndarray
    X: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        X = np.asarray(self.X, dtype=np.float64)
        names = tuple(str(c) for c in self.names)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", names)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        n, p = X.shape
        if y.shape != (n,):
            raise ValueError(f"y has shape {y.shape}, expected ({n},)")
        if n < 2:
            raise ValueError("need at least 2 observations")
        if p < 1:
            raise ValueError("need at least 1 predictor")
        if not np.isfinite(y).all():
            raise ValueError("y contains non-finite values")
        if not np.isfinite(X).all():
            raise ValueError("X contains non-finite values")
        if len(names) != p:
            raise ValueError(f"{len(names)} column labels for {p} columns")
        if len(set(names)) != p:
            raise ValueError("column labels are not unique")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Standardization:
    """Per-column location/scale and the response mean removed by ``standardize``."""

    column_mean: np.ndarray
    column_sd: np.ndarray
    y_mean: float


@dataclass(frozen=True)
class LassoFit:
    """A solution of the weighted-lasso problem at one lambda.

    ``ranked`` lists ``(column index, |beta|)`` for exactly the nonzero
    coefficients, largest magnitude first, ties broken by lower index.
    ``intercept`` is the unpenalized intercept implied by the means of
    the data the fit was run on (zero for centered data).
    """

    beta: np.ndarray
    intercept: float
    lam: float
    weights: np.ndarray
    iterations: int
    converged: bool
    ranked: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class KktReport:
    """Result of a stationarity check: pass flag plus the worst violation."""

    passed: bool
    worst_violation: float
    worst_index: int


def standardize(data: Dataset) -> tuple[Dataset, Standardization]:
    """Center y and scale every predictor column to sample SD 1.

    The sample standard deviation uses denominator n - 1.  Raises
    ``ConstantColumnError`` naming the offending column(s) if any
    predictor has zero variance; the caller may drop them and retry.
    """
    X = data.X
    spans = np.ptp(X, axis=0)
    if np.any(spans == 0.0):
        constant = [name for name, s in zip(data.names, spans) if s == 0.0]
        raise ConstantColumnError(constant)
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    y_mean = float(data.y.mean())
    scaled = Dataset((data.y - y_mean), (X - mean) / sd, data.names)
    return scaled, Standardization(column_mean=mean, column_sd=sd, y_mean=y_mean)


def soft_threshold(z, gamma):
    """sign(z) * max(|z| - gamma, 0); gamma must be nonnegative."""
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be nonnegative")
    return np.sign(z) * np.maximum(np.abs(z) - gamma, 0.0)


def rank_by_magnitude(beta, exclude=()):
    """Nonzero coefficients as (index, |value|), largest first.

    Ties in magnitude are broken by the lower column index; indices in
    ``exclude`` (e.g. forced covariates) are left out entirely.
    """
    skip = {int(j) for j in exclude}
    idx = [int(j) for j in np.flatnonzero(beta) if int(j) not in skip]
    idx.sort(key=lambda j: (-abs(beta[j]), j))
    return tuple((j, float(abs(beta[j]))) for j in idx)


def _resolve_weights(p: int, weights) -> np.ndarray:
    if weights is None:
        return np.ones(p)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (p,):
        raise ValueError(f"weights have shape {w.shape}, expected ({p},)")
    if not np.isfinite(w).all():
        raise ValueError("weights contain non-finite values")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def fit_lasso(
    data: Dataset,
    lam: float,
    weights=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LassoFit:
    """Solve the weighted lasso at one lambda by cyclic coordinate descent.

    Intended for standardized data (see ``standardize``), though the
    solver handles any finite design.  ``weights`` defaults to all ones
    (the plain lasso); weight zero marks an unpenalized column.  The fit
    terminates when the largest coefficient change in a full sweep drops
    below ``tol`` or after ``max_iter`` sweeps, in which case the fit is
    returned with ``converged=False`` and the caller decides.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    w = _resolve_weights(data.p, weights)
    coefs, sweeps, conv = cd_path(
        data.X, data.y, w, np.array([float(lam)]), tol, int(max_iter)
    )
    beta = coefs[0]
    intercept = float(data.y.mean() - data.X.mean(axis=0) @ beta)
    return LassoFit(
        beta=beta,
        intercept=intercept,
        lam=float(lam),
        weights=w,
        iterations=int(sweeps[0]),
        converged=bool(conv[0]),
        ranked=rank_by_magnitude(beta),
    )


def lambda_max(data: Dataset, weights=None) -> float:
    """Smallest penalty at which every penalized coefficient is zero.

    For plain weights this is ``max_j |X_j' y| / w_j``.  Zero-weight
    (unpenalized) columns are first fit by least squares and the inner
    products are taken against that residual, so the returned value
    still guarantees an all-zero penalized solution.
    """
    w = _resolve_weights(data.p, weights)
    penalized = w > 0
    if not penalized.any():
        raise ValueError("all columns are unpenalized; nothing to penalize")
    if (~penalized).any():
        X_free = data.X[:, ~penalized]
        coef, *_ = np.linalg.lstsq(X_free, data.y, rcond=None)
        r = data.y - X_free @ coef
    else:
        r = data.y
    scores = np.abs(data.X[:, penalized].T @ r) / w[penalized]
    return float(scores.max())


def lambda_grid(lmax: float, count: int = 100, ratio: float = 1e-3) -> np.ndarray:
    """Log-spaced descending grid from ``lmax`` down to ``lmax * ratio``."""
    if lmax <= 0:
        raise ValueError("lmax must be positive")
    if count < 2:
        raise ValueError("count must be at least 2")
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    return np.geomspace(lmax, lmax * ratio, int(count))


def kkt_check(fit: LassoFit, data: Dataset, tol: float) -> KktReport:
    """Verify the stationarity conditions of a fit on its data.

    With r = y - X beta: active coordinates need X_j'r equal to
    lam * w_j * sign(beta_j) within ``tol``; inactive ones need
    |X_j'r| <= lam * w_j + tol; zero-weight columns need |X_j'r| <= tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    r = data.y - data.X @ fit.beta
    grad = data.X.T @ r
    lam, w, beta = fit.lam, fit.weights, fit.beta
    violations = np.empty(data.p)
    for j in range(data.p):
        if w[j] == 0.0:
            violations[j] = abs(grad[j])
        elif beta[j] != 0.0:
            violations[j] = abs(grad[j] - lam * w[j] * np.sign(beta[j]))
        else:
            violations[j] = max(0.0, abs(grad[j]) - lam * w[j])
    worst = int(np.argmax(violations))
    return KktReport(
        passed=bool(violations[worst] <= tol),
        worst_violation=float(violations[worst]),
        worst_index=worst,
    )


def lasso_objective(data: Dataset, beta, lam: float, weights=None) -> float:
    """0.5 * ||y - X beta||^2 + lam * sum_j w_j |beta_j|."""
    w = _resolve_weights(data.p, weights)
    beta = np.asarray(beta, dtype=np.float64)
    r = data.y - data.X @ beta
    return float(0.5 * r @ r + lam * np.sum(w * np.abs(beta)))


def marginal_correlation(data: Dataset) -> np.ndarray:
    """Pearson correlation of each predictor column with the response.

    Constant columns (or a constant response) yield NaN rather than an
    error so callers can flag them in reports.
    """
    if data.n < 3:
        raise ValueError("need at least 3 observations for a correlation")
    yc = data.y - data.y.mean()
    y_norm = float(np.sqrt(yc @ yc))
    Xc = data.X - data.X.mean(axis=0)
    x_norms = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    out = np.full(data.p, np.nan)
    if y_norm > 0.0:
        ok = x_norms > 0.0
        out[ok] = (Xc[:, ok].T @ yc) / (x_norms[ok] * y_norm)
    return out
