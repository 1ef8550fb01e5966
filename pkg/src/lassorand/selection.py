"""Penalty selection by K-fold cross-validation with mean absolute error.

The loss is deliberately MAE only: under permuted responses no predictor
carries signal, and an absolute-error criterion is far less sensitive to
the occasional wild fit than squared error, so the selected penalty
stays stable.  Ties in the CV curve go to the larger lambda (the sparser
model).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import cd_path
from .linmodel import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    Dataset,
    lambda_grid,
    lambda_max,
    _resolve_weights,
)


@dataclass(frozen=True)
class FoldAssignment:
    """Balanced random partition of n observations into folds.

    ``fold_of[i]`` is the fold index of observation i; fold sizes differ
    by at most one.
    """

    fold_of: np.ndarray
    n_folds: int

    def __post_init__(self):
        fold_of = np.asarray(self.fold_of, dtype=np.intp)
        object.__setattr__(self, "fold_of", fold_of)
        if fold_of.ndim != 1:
            raise ValueError("fold_of must be 1-D")
        k = int(self.n_folds)
        object.__setattr__(self, "n_folds", k)
        if k < 2:
            raise ValueError("need at least 2 folds")
        if fold_of.min() < 0 or fold_of.max() >= k:
            raise ValueError("fold labels out of range")
        sizes = np.bincount(fold_of, minlength=k)
        if sizes.min() < 1:
            raise ValueError("every fold needs at least one observation")
        if sizes.max() - sizes.min() > 1:
            raise ValueError("fold sizes differ by more than 1")

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]


@dataclass(frozen=True)
class CvCurve:
    """Cross-validated MAE over a lambda grid and the chosen lambda.

    ``dropped`` records (fold index, column name) pairs for columns that
    were constant within a training split and excluded from that fold's
    fits.
    """

    lambdas: np.ndarray
    mae: np.ndarray
    chosen_lambda: float
    chosen_index: int
    dropped: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class CvConfig:
    """Settings for ``select_lambda``.

    ``grid`` overrides the generated lambda grid when given; otherwise
    the grid spans ``lambda_max`` down to ``lambda_max * grid_ratio`` in
    ``grid_size`` log-spaced steps.
    """

    n_folds: int = 10
    grid_size: int = 100
    grid_ratio: float = 1e-3
    seed: int = 0
    grid: tuple[float, ...] | None = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER


def make_folds(n: int, n_folds: int, seed) -> FoldAssignment:
    """Random balanced fold assignment, reproducible from the seed."""
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if n_folds > n:
        raise ValueError(f"cannot split {n} observations into {n_folds} folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.intp)
    fold_of[order] = np.arange(n) % n_folds
    return FoldAssignment(fold_of=fold_of, n_folds=int(n_folds))


def mae_profile(y, predictions) -> np.ndarray:
    """Mean absolute error of each prediction column against y.

    A single corrupted response moves every entry by at most |delta| / n,
    which is what makes the MAE criterion robust to extreme fits.
    """
    y = np.asarray(y, dtype=np.float64)
    predictions = np.asarray(predictions, dtype=np.float64)
    return np.abs(y[:, None] - predictions).mean(axis=0)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a nonempty 1-D vector")
    if np.any(grid < 0) or not np.isfinite(grid).all():
        raise ValueError("grid values must be finite and nonnegative")
    if np.any(np.diff(grid) > 0):
        raise ValueError("grid must be nonincreasing")
    return grid


def cv_curve(
    data: Dataset,
    grid,
    folds: FoldAssignment,
    weights=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CvCurve:
    """Cross-validated MAE for every lambda in a descending grid.

    Each training split is re-standardized on its own rows (and its own
    response mean); held-out predictions apply the training transform,
    so no fold ever sees statistics of its held-out rows.  Columns that
    are constant within a training split are dropped for that fold's
    fits and recorded.  MAE values are averaged over all n held-out
    predictions; the chosen lambda is the argmin, ties to the larger
    lambda.
    """
    grid = _check_grid(grid)
    if folds.n != data.n:
        raise ValueError("fold assignment does not match the dataset size")
    w = _resolve_weights(data.p, weights)

    predictions = np.empty((data.n, grid.size))
    dropped: list[tuple[int, str]] = []
    for k in range(folds.n_folds):
        test = folds.fold_of == k
        train = ~test
        X_tr = data.X[train]
        y_tr = data.y[train]
        keep = np.ptp(X_tr, axis=0) > 0.0
        if not keep.all():
            dropped.extend((k, data.names[j]) for j in np.flatnonzero(~keep))
        mean = X_tr[:, keep].mean(axis=0)
        sd = X_tr[:, keep].std(axis=0, ddof=1)
        y_mean = y_tr.mean()
        Z_tr = np.asfortranarray((X_tr[:, keep] - mean) / sd)
        coefs, _, _ = cd_path(Z_tr, y_tr - y_mean, w[keep], grid, tol, max_iter)
        Z_te = (data.X[test][:, keep] - mean) / sd
        predictions[test] = y_mean + Z_te @ coefs.T

    mae = mae_profile(data.y, predictions)
    chosen_index = int(np.argmin(mae))
    return CvCurve(
        lambdas=grid,
        mae=mae,
        chosen_lambda=float(grid[chosen_index]),
        chosen_index=chosen_index,
        dropped=tuple(dropped),
    )


def select_lambda(
    data: Dataset, config: CvConfig = CvConfig(), weights=None
) -> tuple[float, CvCurve]:
    """Choose lambda by K-fold MAE cross-validation.

    Builds the grid from the full-data ``lambda_max`` (shared across
    folds for comparable curves), draws folds from the config seed, and
    returns the winning lambda with the full curve.  When the response
    is orthogonal to every penalized column (``lambda_max`` = 0, e.g. a
    constant response) the grid degenerates to the single value 0.
    """
    folds = make_folds(data.n, config.n_folds, config.seed)
    if config.grid is not None:
        grid = _check_grid(config.grid)
    else:
        lmax = lambda_max(data, weights)
        if lmax > 0.0:
            grid = lambda_grid(lmax, config.grid_size, config.grid_ratio)
        else:
            grid = np.array([0.0])
    curve = cv_curve(
        data, grid, folds, weights=weights, tol=config.tol, max_iter=config.max_iter
    )
    return curve.chosen_lambda, curve
