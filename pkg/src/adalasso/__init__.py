"""adalasso: weighted (adaptive) lasso with honest cross-validation.

Coordinate-descent weighted lasso, OLS/ridge/lasso pilot weight schemes, and
two penalty-calibration strategies: the cheap simple K-fold CV (which leaks
information when the weights come from the full sample) and the nested CV
that recomputes weights per fold. Includes seeded synthetic data generation,
support-recovery metrics, and a replication harness with a CLI.
"""

__version__ = "0.1.0"

from .calibration import (
    CalibratedFit,
    RidgeCvFit,
    WeightScheme,
    adaptive_lasso,
    make_weights,
    nested_cv_lasso,
    simple_cv_lasso,
    simple_cv_ridge,
)
from .core import (
    AdalassoError,
    ConfigError,
    ConvergenceError,
    CvCurve,
    DataError,
    Dataset,
    DegenerateWeightsError,
    FoldAssignment,
    InvalidCovarianceError,
    InvalidFoldsError,
    NumericalError,
    ShapeError,
    SingularDesignError,
    UnpenalizedCoordinateError,
    ZeroSignalError,
    partition_folds,
    read_dataset_csv,
    seeded_rng,
    write_dataset_csv,
)
from .datagen import (
    CovarianceSpec,
    SimDesign,
    build_covariance,
    draw_beta_star,
    sample_dataset,
    standin_covariance,
)
from .metrics import precision_recall, pred_error, signed_support_accuracy
from .solvers import (
    DEFAULT_CONFIG,
    SolverConfig,
    build_lambda_path,
    kkt_max_violation,
    lambda_max,
    lasso_path_fit,
    ols_fit,
    ridge_fit,
    soft_threshold,
    weighted_lasso_fit,
)

__all__ = [
    "__version__",
    "AdalassoError",
    "ConfigError",
    "DataError",
    "ShapeError",
    "InvalidCovarianceError",
    "InvalidFoldsError",
    "NumericalError",
    "ConvergenceError",
    "DegenerateWeightsError",
    "SingularDesignError",
    "UnpenalizedCoordinateError",
    "ZeroSignalError",
    "Dataset",
    "FoldAssignment",
    "CvCurve",
    "seeded_rng",
    "partition_folds",
    "read_dataset_csv",
    "write_dataset_csv",
    "SolverConfig",
    "DEFAULT_CONFIG",
    "soft_threshold",
    "weighted_lasso_fit",
    "kkt_max_violation",
    "lambda_max",
    "build_lambda_path",
    "lasso_path_fit",
    "ols_fit",
    "ridge_fit",
    "WeightScheme",
    "CalibratedFit",
    "RidgeCvFit",
    "make_weights",
    "simple_cv_lasso",
    "simple_cv_ridge",
    "nested_cv_lasso",
    "adaptive_lasso",
    "CovarianceSpec",
    "SimDesign",
    "build_covariance",
    "draw_beta_star",
    "sample_dataset",
    "standin_covariance",
    "pred_error",
    "signed_support_accuracy",
    "precision_recall",
]
