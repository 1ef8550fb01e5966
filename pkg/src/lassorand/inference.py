"""Randomization test for the rank-k feature selected by the lasso.

The hypotheses are about *ranks*, not named predictors: "is the k-th
largest selected coefficient bigger than what selection alone would
produce?".  The null distribution is built by refitting the model on
response-permuted copies of the data; permuting y severs any
association with the predictors while leaving the predictor matrix
(and its correlation structure) untouched.

Workflow per ``permutation_test`` call:

1. standardize the data (unit-SD columns, centered response);
2. fit the original model at a cross-validated lambda (or a caller
   supplied one) and rank the nonzero coefficients by magnitude;
3. for b = 1..B, permute y, refit (fresh CV per permutation by
   default, or the original lambda under ``reuse_lambda``), and record
   the rank-k magnitudes |beta_(k)^b| (zero when fewer than k selected);
4. p-value for rank k = (1 + #{b : |beta_(k)^b| >= |beta_(k)|}) / (B+1),
   followed by the sequential Holm step-down over ranks.

Every random draw comes from a substream keyed by the permutation
index, so results are identical no matter how many workers run the
permutations.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ._rng import substream, substream_seed
from .linmodel import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    Dataset,
    fit_lasso,
    rank_by_magnitude,
    standardize,
)
from .selection import CvConfig, CvCurve, select_lambda

CV_PER_PERMUTATION = "cv_per_permutation"
FIXED_FROM_ORIGINAL = "fixed_from_original"


@dataclass(frozen=True)
class InferenceConfig:
    """Settings for ``permutation_test``.

    ``max_rank`` limits how many ranks are tested; ``None`` means every
    feature selected by the original fit.  ``reuse_lambda`` and
    ``lambda_policy`` encode the same switch: by default each
    permutation re-runs cross-validation on the permuted data
    (``cv_per_permutation``); ``reuse_lambda=True`` (equivalently
    ``lambda_policy="fixed_from_original"``) reuses the original
    lambda, the much cheaper variant.
    """

    n_permutations: int = 100
    alpha: float = 0.05
    max_rank: int | None = None
    reuse_lambda: bool = False
    lambda_policy: str | None = None
    seed: int = 0
    cv: CvConfig = field(default_factory=CvConfig)
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.n_permutations < 1:
            raise ValueError("need at least 1 permutation")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.max_rank is not None and self.max_rank < 1:
            raise ValueError("max_rank must be at least 1")
        if self.lambda_policy is None:
            policy = FIXED_FROM_ORIGINAL if self.reuse_lambda else CV_PER_PERMUTATION
            object.__setattr__(self, "lambda_policy", policy)
        elif self.lambda_policy not in (CV_PER_PERMUTATION, FIXED_FROM_ORIGINAL):
            raise ValueError(f"unknown lambda_policy: {self.lambda_policy!r}")
        object.__setattr__(
            self, "reuse_lambda", self.lambda_policy == FIXED_FROM_ORIGINAL
        )


@dataclass(frozen=True)
class InferenceResult:
    """Observed rank magnitudes, their null samples, and the decisions.

    Arrays are aligned by rank: row k-1 of ``null_samples`` is the null
    distribution for rank k.  ``selected_names`` lists every feature
    selected by the original fit in rank order (which may be shorter or
    longer than the number of ranks tested).  ``p_values[k-1]`` always
    equals ``pvalue_from_null(observed[k-1], null_samples[k-1])``.
    """

    observed: np.ndarray
    null_samples: np.ndarray
    p_values: np.ndarray
    holm_thresholds: np.ndarray
    holm_reject: np.ndarray
    chosen_lambda_original: float
    selected_names: tuple[str, ...]
    cv_curve: CvCurve | None
    nonconverged_permutations: int

    @property
    def n_ranks(self) -> int:
        return self.p_values.shape[0]


def pvalue_from_null(observed: float, null) -> float:
    """(1 + #{null >= observed}) / (B + 1); ties count as exceedances."""
    null = np.asarray(null, dtype=np.float64)
    if null.ndim != 1 or null.size < 1:
        raise ValueError("null must be a nonempty 1-D vector")
    exceed = int(np.count_nonzero(null >= observed))
    return (1 + exceed) / (null.size + 1)


def sequential_holm(p_values, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Step-down test of ranks in selection order.

    Rank k (1-based) is compared against alpha / (m + 1 - k); testing
    stops at the first failure so rejections always form a prefix.
    Unlike the classical procedure the p-values are *not* sorted by
    size first, which keeps the familywise error rate controlled while
    never declaring a later rank significant ahead of an earlier one.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    p_values = np.asarray(p_values, dtype=np.float64)
    m = p_values.shape[0]
    ranks = np.arange(1, m + 1)
    thresholds = alpha / (m + 1 - ranks)
    reject = np.zeros(m, dtype=bool)
    for k in range(m):
        if p_values[k] <= thresholds[k]:
            reject[k] = True
        else:
            break
    return thresholds, reject


def _rank_magnitudes(fit_beta, exclude, m: int) -> np.ndarray:
    """|beta| of ranks 1..m (zeros past the number selected)."""
    ranked = rank_by_magnitude(fit_beta, exclude=exclude)
    out = np.zeros(m)
    for k, (_, magnitude) in enumerate(ranked[:m]):
        out[k] = magnitude
    return out


def _permutation_column(std, weights, forced, m, config, lam_original, b):
    """Null magnitudes for permutation b, drawn from its own substream."""
    rng = substream(config.seed, b, 0)
    permuted = Dataset(std.y[rng.permutation(std.n)], std.X, std.names)
    if config.lambda_policy == FIXED_FROM_ORIGINAL:
        lam = lam_original
    else:
        cv_cfg = dataclasses.replace(
            config.cv, seed=substream_seed(config.seed, b, 1)
        )
        lam, _ = select_lambda(permuted, cv_cfg, weights=weights)
    fit = fit_lasso(
        permuted, lam, weights=weights, tol=config.tol, max_iter=config.max_iter
    )
    return _rank_magnitudes(fit.beta, forced, m), fit.converged


def permutation_test(
    data: Dataset,
    config: InferenceConfig = InferenceConfig(),
    weights=None,
    forced_indices=(),
    lambda_original: float | None = None,
    workers: int = 1,
) -> InferenceResult:
    """Test the ranks selected by the lasso against permutation nulls.

    ``weights`` are per-column penalty factors passed to every fit
    (zero marks a forced, unpenalized column); ``forced_indices`` are
    excluded from the magnitude ranking and never count as selected
    features.  ``lambda_original`` overrides the cross-validated choice
    for the original fit.  ``workers`` > 1 runs permutations in
    parallel processes; results are identical for any worker count.

    Permutations that fail to converge within ``config.max_iter`` are
    counted in ``nonconverged_permutations`` but their coefficients are
    still used.
    """
    std, _ = standardize(data)
    forced = tuple(int(j) for j in forced_indices)

    if lambda_original is None:
        cv_cfg = dataclasses.replace(config.cv, seed=substream_seed(config.seed, 0))
        lam0, curve = select_lambda(std, cv_cfg, weights=weights)
    else:
        if lambda_original < 0:
            raise ValueError("lambda_original must be nonnegative")
        lam0, curve = float(lambda_original), None

    fit0 = fit_lasso(
        std, lam0, weights=weights, tol=config.tol, max_iter=config.max_iter
    )
    ranked0 = rank_by_magnitude(fit0.beta, exclude=forced)
    selected_names = tuple(std.names[j] for j, _ in ranked0)

    if config.max_rank is not None:
        m = min(config.max_rank, std.p - len(forced))
    else:
        m = len(ranked0)
    observed = _rank_magnitudes(fit0.beta, forced, m)

    if m == 0:
        # Nothing selected and no ranks requested: no null to build.
        empty = np.zeros(0)
        return InferenceResult(
            observed=empty,
            null_samples=np.zeros((0, config.n_permutations)),
            p_values=empty,
            holm_thresholds=empty,
            holm_reject=np.zeros(0, dtype=bool),
            chosen_lambda_original=lam0,
            selected_names=selected_names,
            cv_curve=curve,
            nonconverged_permutations=0,
        )

    b_indices = range(1, config.n_permutations + 1)
    if workers > 1:
        columns = Parallel(n_jobs=workers)(
            delayed(_permutation_column)(
                std, weights, forced, m, config, lam0, b
            )
            for b in b_indices
        )
    else:
        columns = [
            _permutation_column(std, weights, forced, m, config, lam0, b)
            for b in b_indices
        ]

    null_samples = np.column_stack([col for col, _ in columns])
    nonconverged = sum(0 if ok else 1 for _, ok in columns)

    p_values = np.array(
        [pvalue_from_null(observed[k], null_samples[k]) for k in range(m)]
    )
    thresholds, reject = sequential_holm(p_values, config.alpha)
    return InferenceResult(
        observed=observed,
        null_samples=null_samples,
        p_values=p_values,
        holm_thresholds=thresholds,
        holm_reject=reject,
        chosen_lambda_original=lam0,
        selected_names=selected_names,
        cv_curve=curve,
        nonconverged_permutations=nonconverged,
    )
