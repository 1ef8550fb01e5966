"""Forcing design covariates into the model while selecting from the rest.

Two mechanisms, both keyed by a ``ForcedPartition``:

* ``residualize`` regresses the response on the forced columns by OLS
  and hands the residuals (with the forced columns removed) to the
  usual selection pipeline.  Simple, but it assumes the forced and
  selectable predictors act independently.
* ``forced_weights`` builds a penalty-weight vector with zeros on the
  forced columns, so a single joint fit leaves them unshrunk.  This is
  the default mode downstream because it makes no independence
  assumption.

Forced columns never count as selected features: they are excluded
from magnitude ranking and from the hypothesis ranks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linmodel import Dataset

RESIDUALIZE = "residualize"
ZERO_WEIGHT = "zero_weight"

# Stand-in penalty weight for a zero univariate slope; large enough to
# exclude the column without making the objective infinite.
ZERO_SLOPE_WEIGHT_CAP = 1e8


@dataclass(frozen=True)
class ForcedPartition:
    """Disjoint split of the columns into forced and selectable sets."""

    forced_indices: tuple[int, ...]
    selectable_indices: tuple[int, ...]
    mode: str

    def __post_init__(self):
        forced = tuple(int(j) for j in self.forced_indices)
        selectable = tuple(int(j) for j in self.selectable_indices)
        object.__setattr__(self, "forced_indices", forced)
        object.__setattr__(self, "selectable_indices", selectable)
        if self.mode not in (RESIDUALIZE, ZERO_WEIGHT):
            raise ValueError(f"unknown partition mode: {self.mode!r}")
        both = set(forced) & set(selectable)
        if both:
            raise ValueError(f"columns in both sets: {sorted(both)}")

    @classmethod
    def from_forced(cls, p: int, forced_indices, mode: str) -> "ForcedPartition":
        """Partition from the forced set; the complement is selectable."""
        forced = sorted({int(j) for j in forced_indices})
        if forced and (forced[0] < 0 or forced[-1] >= p):
            raise ValueError("forced index out of range")
        selectable = tuple(j for j in range(p) if j not in set(forced))
        return cls(
            forced_indices=tuple(forced), selectable_indices=selectable, mode=mode
        )

    @property
    def p(self) -> int:
        return len(self.forced_indices) + len(self.selectable_indices)


def residualize(data: Dataset, partition: ForcedPartition) -> Dataset:
    """Replace the response with OLS residuals on the forced columns.

    Fits y on the forced columns plus an intercept and returns a new
    dataset whose response is the residual and whose predictors are the
    selectable columns only.  An empty forced set just centers y.
    Raises if the forced columns are collinear, naming the dependent
    ones.
    """
    if partition.mode != RESIDUALIZE:
        raise ValueError("partition mode is not 'residualize'")
    if partition.p != data.p:
        raise ValueError("partition does not cover the dataset columns")
    forced = list(partition.forced_indices)
    if len(forced) + 1 >= data.n:
        raise ValueError("forced set too large to fit by least squares")

    design = np.column_stack([np.ones(data.n), data.X[:, forced]])
    _, r_diag, pivots = scipy.linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r_diag))
    rank = int(np.sum(diag > diag.max() * max(design.shape) * np.finfo(float).eps))
    if rank < design.shape[1]:
        dependent = [
            data.names[forced[j - 1]] for j in pivots[rank:] if j > 0
        ]
        raise ValueError(
            "forced columns are linearly dependent: " + ", ".join(dependent)
        )

    coef, *_ = np.linalg.lstsq(design, data.y, rcond=None)
    residual = data.y - design @ coef
    keep = list(partition.selectable_indices)
    return Dataset(
        residual, data.X[:, keep], tuple(data.names[j] for j in keep)
    )


def forced_weights(p: int, partition: ForcedPartition) -> np.ndarray:
    """Penalty weights: 0 on forced columns, 1 elsewhere."""
    if partition.mode != ZERO_WEIGHT:
        raise ValueError("partition mode is not 'zero_weight'")
    if partition.p != p:
        raise ValueError(f"partition covers {partition.p} columns, expected {p}")
    w = np.ones(p)
    w[list(partition.forced_indices)] = 0.0
    return w


def adaptive_weights(data: Dataset, nu: float, cap: float = ZERO_SLOPE_WEIGHT_CAP):
    """Penalty weights 1 / |univariate slope|^nu from standardized columns.

    The slope for column j is the single-predictor OLS coefficient of y
    on the centered, unit-SD version of that column.  A zero slope gets
    the weight ``cap`` (flagged with a warning) rather than infinity,
    which effectively excludes the column while keeping the objective
    finite.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    yc = data.y - data.y.mean()
    Xc = data.X - data.X.mean(axis=0)
    ss = np.einsum("ij,ij->j", Xc, Xc)
    slopes = np.zeros(data.p)
    ok = ss > 0.0
    # Slope on the unit-SD scale: (x'y / x'x) * sd(x) with ddof=1.
    slopes[ok] = (Xc[:, ok].T @ yc) / ss[ok] * np.sqrt(ss[ok] / (data.n - 1))
    weights = np.full(data.p, float(cap))
    nonzero = slopes != 0.0
    weights[nonzero] = 1.0 / np.abs(slopes[nonzero]) ** nu
    weights = np.minimum(weights, cap)
    if np.any(~nonzero):
        flagged = [data.names[j] for j in np.flatnonzero(~nonzero)]
        warnings.warn(
            "zero univariate slope; weight capped for: " + ", ".join(flagged),
            stacklevel=2,
        )
    return weights
