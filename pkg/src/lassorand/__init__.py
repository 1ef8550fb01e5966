"""Randomization inference for features selected by the lasso."""

from ._kernel import BACKEND as KERNEL_BACKEND
from .covariates import (
    ForcedPartition,
    adaptive_weights,
    forced_weights,
    residualize,
)
from .inference import (
    InferenceConfig,
    InferenceResult,
    permutation_test,
    pvalue_from_null,
    sequential_holm,
)
from .io import TableFormatError, load_table
from .linmodel import (
    ConstantColumnError,
    Dataset,
    KktReport,
    LassoFit,
    Standardization,
    fit_lasso,
    kkt_check,
    lambda_grid,
    lambda_max,
    lasso_objective,
    marginal_correlation,
    rank_by_magnitude,
    soft_threshold,
    standardize,
)
from .selection import (
    CvConfig,
    CvCurve,
    FoldAssignment,
    cv_curve,
    mae_profile,
    make_folds,
    select_lambda,
)
from .simulate import (
    PowerTable,
    PrecisionTable,
    SimConfig,
    gen_dataset,
    gen_design,
    gen_response,
    power_grid,
    power_study,
    precision_study,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "ConstantColumnError",
    "CvConfig",
    "CvCurve",
    "Dataset",
    "FoldAssignment",
    "ForcedPartition",
    "InferenceConfig",
    "InferenceResult",
    "KktReport",
    "LassoFit",
    "PowerTable",
    "PrecisionTable",
    "SimConfig",
    "Standardization",
    "TableFormatError",
    "adaptive_weights",
    "cv_curve",
    "fit_lasso",
    "forced_weights",
    "gen_dataset",
    "gen_design",
    "gen_response",
    "kkt_check",
    "lambda_grid",
    "lambda_max",
    "lasso_objective",
    "load_table",
    "mae_profile",
    "make_folds",
    "marginal_correlation",
    "permutation_test",
    "power_grid",
    "power_study",
    "precision_study",
    "pvalue_from_null",
    "rank_by_magnitude",
    "residualize",
    "select_lambda",
    "sequential_holm",
    "soft_threshold",
    "standardize",
]
