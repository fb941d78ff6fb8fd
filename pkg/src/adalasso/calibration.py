"""Cross-validation calibration of the weighted (adaptive) lasso.

Two ways to pick the penalty level when the weights themselves are estimated
from data:

* **simple** -- compute the weights once from the full sample, then run
  ordinary K-fold CV on the weighted problem with those weights held fixed.
  Cheap, but the held-out rows already shaped the weights, so the fold
  errors are not honest out-of-sample estimates: they keep falling as the
  penalty shrinks and the selected lambda is biased low, which inflates the
  selected support.
* **nested** -- recompute the weights inside every fold from that fold's
  training rows only (running the pilot estimator, including any inner CV it
  needs, on the reduced sample). Each fold error then measures the whole
  pipeline -- pilot estimate, weights, weighted lasso -- on genuinely unseen
  rows.

Both schemes share the penalty grid built from the full data and the same
final step: refit on the full data with the full-data weights at the
selected lambda.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigError,
    CvCurve,
    Dataset,
    FoldAssignment,
    partition_folds,
)
from .solvers import (
    DEFAULT_CONFIG,
    SolverConfig,
    build_lambda_path,
    lasso_path_fit,
    ols_fit,
    ridge_fit,
    ridge_lambda_grid,
    ridge_path_fit,
    weighted_lasso_fit,
)

__all__ = [
    "SIMPLE_CV",
    "NESTED_CV",
    "UNIT",
    "OLS",
    "RIDGE_CV",
    "LASSO_CV",
    "WeightScheme",
    "CalibratedFit",
    "RidgeCvFit",
    "make_weights",
    "simple_cv_lasso",
    "simple_cv_ridge",
    "nested_cv_lasso",
    "adaptive_lasso",
]

SIMPLE_CV = "simple"
NESTED_CV = "nested"

UNIT = "unit"
OLS = "ols"
RIDGE_CV = "ridge_cv"
LASSO_CV = "lasso_cv"

_KINDS = (UNIT, OLS, RIDGE_CV, LASSO_CV)


@dataclass(frozen=True)
class WeightScheme:
    """How penalty weights are derived from a pilot estimate.

    ``kind`` is one of ``"unit"`` (all-ones weights, i.e. the plain lasso),
    ``"ols"``, ``"ridge_cv"`` or ``"lasso_cv"`` (pilot = OLS, CV-tuned ridge,
    or CV-tuned unit-weight lasso). ``epsilon >= 0`` stabilizes the weight
    map ``w_j = 1 / (|b_j| + epsilon)``; with the default 0, a zero pilot
    coefficient gives an infinite weight and excludes that coordinate.
    """

    kind: str
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ConfigError(
                f"unknown weight scheme {self.kind!r}; expected one of {_KINDS}"
            )
        if not (float(self.epsilon) >= 0):
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")

    @classmethod
    def unit(cls) -> "WeightScheme":
        return cls(UNIT)

    @classmethod
    def ols(cls, epsilon: float = 0.0) -> "WeightScheme":
        return cls(OLS, epsilon)

    @classmethod
    def ridge_cv(cls, epsilon: float = 0.0) -> "WeightScheme":
        return cls(RIDGE_CV, epsilon)

    @classmethod
    def lasso_cv(cls, epsilon: float = 0.0) -> "WeightScheme":
        return cls(LASSO_CV, epsilon)


@dataclass(frozen=True)
class CalibratedFit:
    """Result of a CV-calibrated weighted-lasso fit.

    ``beta`` is the full-data refit at ``lambda_selected`` with
    ``weights_used`` (the full-data weights, also under the nested scheme).
    ``cv_scheme`` records which calibration produced it. ``fold_weights``
    (nested only) holds the per-fold recomputed weights, one row per fold.
    """

    beta: np.ndarray
    lambda_selected: float
    curve: CvCurve
    weights_used: np.ndarray
    cv_scheme: str
    intercept: float = 0.0
    fold_weights: np.ndarray | None = None

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta)


@dataclass(frozen=True)
class RidgeCvFit:
    """CV-tuned ridge fit: full-data solution at the selected penalty."""

    beta: np.ndarray
    lambda_selected: float
    curve: CvCurve
    intercept: float = 0.0


def make_weights(beta_init: np.ndarray, epsilon: float = 0.0) -> np.ndarray:
    """Penalty weights ``w_j = 1 / (|beta_init_j| + epsilon)``.

    With ``epsilon = 0`` a zero pilot coefficient maps to ``+inf``, which the
    solver treats as exclusion (the coefficient is pinned at zero). If every
    pilot coefficient is zero the weights are all infinite; downstream
    solvers reject that as degenerate.
    """
    beta_init = np.asarray(beta_init, dtype=np.float64)
    if beta_init.ndim != 1:
        raise ConfigError("beta_init must be 1-d")
    if not (float(epsilon) >= 0):
        raise ConfigError(f"epsilon must be >= 0, got {epsilon}")
    with np.errstate(divide="ignore"):
        return 1.0 / (np.abs(beta_init) + float(epsilon))


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _resolve_folds(
    data: Dataset,
    n_folds: int,
    rng: np.random.Generator | None,
    folds: FoldAssignment | None,
) -> FoldAssignment:
    if folds is not None:
        if folds.n != data.n or folds.n_folds != int(n_folds):
            raise ConfigError(
                "provided fold assignment does not match the data/n_folds"
            )
        return folds
    if rng is None:
        raise ConfigError("either rng or a precomputed fold assignment is required")
    return partition_folds(data.n, n_folds, rng)


def _path_intercepts(train: Dataset, betas: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    if not cfg.intercept:
        return np.zeros(betas.shape[0])
    return train.y.mean() - betas @ train.X.mean(axis=0)


def _path_test_errors(test: Dataset, betas: np.ndarray,
                      intercepts: np.ndarray) -> np.ndarray:
    """Mean squared test error of every row of ``betas`` at once."""
    preds = betas @ test.X.T + intercepts[:, None]
    resid = test.y[None, :] - preds
    return np.mean(resid * resid, axis=1)


# ---------------------------------------------------------------------------
# calibrators
# ---------------------------------------------------------------------------

def simple_cv_lasso(
    data: Dataset,
    weights: np.ndarray,
    n_folds: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rng: np.random.Generator | None = None,
    *,
    folds: FoldAssignment | None = None,
    n_lambdas: int = 100,
    min_ratio: float | None = None,
) -> CalibratedFit:
    """K-fold CV for the weighted lasso with fixed weights.

    Builds the penalty grid from the full data, fits the warm-started path
    on each fold's training rows, scores it on the held-out rows, picks the
    lambda with the smallest mean fold error (ties go to the larger lambda),
    and refits on the full data. With unit weights this is plain lasso CV.
    """
    weights = np.asarray(weights, dtype=np.float64)
    path = build_lambda_path(data, weights, n_lambdas=n_lambdas,
                             min_ratio=min_ratio, cfg=cfg)
    folds = _resolve_folds(data, n_folds, rng, folds)
    fold_errors = np.empty((path.shape[0], folds.n_folds))
    for k in range(folds.n_folds):
        train = data.rows(folds.train_indices(k))
        test = data.rows(folds.test_indices(k))
        betas = lasso_path_fit(train, weights, path, cfg)
        fold_errors[:, k] = _path_test_errors(
            test, betas, _path_intercepts(train, betas, cfg)
        )
    curve = CvCurve(lambdas=path, fold_errors=fold_errors)
    beta = weighted_lasso_fit(data, weights, curve.selected_lambda, cfg)
    return CalibratedFit(
        beta=beta,
        lambda_selected=curve.selected_lambda,
        curve=curve,
        weights_used=weights.copy(),
        cv_scheme=SIMPLE_CV,
        intercept=_intercept_of(data, beta, cfg),
    )


def _intercept_of(data: Dataset, beta: np.ndarray, cfg: SolverConfig) -> float:
    if not cfg.intercept:
        return 0.0
    return float(data.y.mean() - data.X.mean(axis=0) @ beta)


def simple_cv_ridge(
    data: Dataset,
    n_folds: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rng: np.random.Generator | None = None,
    *,
    folds: FoldAssignment | None = None,
    n_lambdas: int = 100,
) -> RidgeCvFit:
    """K-fold CV for ridge over the log-spaced grid, then a full-data refit.

    Ridge solves its exact closed form, so ``cfg`` only contributes the
    intercept flag here (column standardization does not apply to the
    isotropic L2 penalty as implemented).
    """
    grid = ridge_lambda_grid(data, n_lambdas=n_lambdas)
    folds = _resolve_folds(data, n_folds, rng, folds)
    fold_errors = np.empty((grid.shape[0], folds.n_folds))
    for k in range(folds.n_folds):
        train = data.rows(folds.train_indices(k))
        test = data.rows(folds.test_indices(k))
        if cfg.intercept:
            centered = Dataset(train.y - train.y.mean(),
                               train.X - train.X.mean(axis=0))
            betas = ridge_path_fit(centered, grid)
        else:
            betas = ridge_path_fit(train, grid)
        fold_errors[:, k] = _path_test_errors(
            test, betas, _path_intercepts(train, betas, cfg)
        )
    curve = CvCurve(lambdas=grid, fold_errors=fold_errors)
    if cfg.intercept:
        centered = Dataset(data.y - data.y.mean(), data.X - data.X.mean(axis=0))
        beta = ridge_fit(centered, curve.selected_lambda)
    else:
        beta = ridge_fit(data, curve.selected_lambda)
    return RidgeCvFit(
        beta=beta,
        lambda_selected=curve.selected_lambda,
        curve=curve,
        intercept=_intercept_of(data, beta, cfg),
    )


def _pilot_estimate(
    train: Dataset,
    kind: str,
    n_folds: int,
    cfg: SolverConfig,
    rng: np.random.Generator | None,
) -> np.ndarray:
    """Pilot coefficients for weight construction on ``train`` only."""
    if kind == OLS:
        return ols_fit(train)
    if kind == RIDGE_CV:
        return simple_cv_ridge(train, n_folds, cfg, rng).beta
    if kind == LASSO_CV:
        unit = np.ones(train.p)
        return simple_cv_lasso(train, unit, n_folds, cfg, rng).beta
    raise ConfigError(f"no pilot estimator for weight scheme {kind!r}")


def nested_cv_lasso(
    data: Dataset,
    weights: np.ndarray,
    scheme: WeightScheme,
    n_folds: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rng: np.random.Generator | None = None,
    *,
    folds: FoldAssignment | None = None,
    path_unit_weights: bool = False,
    n_lambdas: int = 100,
    min_ratio: float | None = None,
) -> CalibratedFit:
    """K-fold CV for the adaptive lasso with per-fold weight recomputation.

    ``weights`` are the full-data weights, used for the penalty grid and the
    final refit. Inside fold k the pilot estimator named by ``scheme`` is
    rerun on the training rows alone (``lasso_cv`` and ``ridge_cv`` pilots
    run their own K-fold CV there, with the same K), its weights drive the
    path fit, and the held-out rows score it. A fold whose recomputed
    weights are all infinite contributes the null model: zero coefficients,
    so its errors are the held-out mean of ``y**2`` (or the variance around
    the training mean when an intercept is fitted).

    ``path_unit_weights=True`` switches the shared grid to the one built
    from unit weights instead of ``weights``; the default grid matches the
    simple scheme so the two calibrations are comparable point by point.
    """
    if scheme.kind == UNIT:
        raise ConfigError(
            "nested CV needs a data-driven weight scheme (ols, ridge_cv, lasso_cv)"
        )
    weights = np.asarray(weights, dtype=np.float64)
    path_w = np.ones(data.p) if path_unit_weights else weights
    path = build_lambda_path(data, path_w, n_lambdas=n_lambdas,
                             min_ratio=min_ratio, cfg=cfg)
    folds = _resolve_folds(data, n_folds, rng, folds)
    if rng is None:
        raise ConfigError("nested CV requires an rng for the per-fold pilots")
    sub_rngs = rng.spawn(folds.n_folds)
    fold_errors = np.empty((path.shape[0], folds.n_folds))
    fold_weights = np.empty((folds.n_folds, data.p))
    for k in range(folds.n_folds):
        train = data.rows(folds.train_indices(k))
        test = data.rows(folds.test_indices(k))
        pilot = _pilot_estimate(train, scheme.kind, n_folds, cfg, sub_rngs[k])
        w_k = make_weights(pilot, scheme.epsilon)
        fold_weights[k] = w_k
        if not np.any(np.isfinite(w_k)):
            # Degenerate fold: the pilot vanished, every coordinate is
            # excluded, and the fold's model is identically zero.
            center = train.y.mean() if cfg.intercept else 0.0
            fold_errors[:, k] = float(np.mean((test.y - center) ** 2))
            continue
        betas = lasso_path_fit(train, w_k, path, cfg)
        fold_errors[:, k] = _path_test_errors(
            test, betas, _path_intercepts(train, betas, cfg)
        )
    curve = CvCurve(lambdas=path, fold_errors=fold_errors)
    beta = weighted_lasso_fit(data, weights, curve.selected_lambda, cfg)
    return CalibratedFit(
        beta=beta,
        lambda_selected=curve.selected_lambda,
        curve=curve,
        weights_used=weights.copy(),
        cv_scheme=NESTED_CV,
        intercept=_intercept_of(data, beta, cfg),
        fold_weights=fold_weights,
    )


def adaptive_lasso(
    data: Dataset,
    scheme: WeightScheme,
    cv_scheme: str,
    n_folds: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rng: np.random.Generator | None = None,
    *,
    n_lambdas: int = 100,
    min_ratio: float | None = None,
    path_unit_weights: bool = False,
) -> CalibratedFit:
    """Full two-step pipeline: pilot estimate -> weights -> calibrated fit.

    Step 1 computes the pilot on the full data (CV-based pilots reuse the
    same fold assignment as step 2, drawn once from ``rng``). Step 2
    calibrates lambda under ``cv_scheme`` ("simple" or "nested") and refits.
    ``scheme.kind="unit"`` is the plain lasso: there is no pilot and only
    the simple scheme applies.
    """
    if cv_scheme not in (SIMPLE_CV, NESTED_CV):
        raise ConfigError(
            f"cv_scheme must be {SIMPLE_CV!r} or {NESTED_CV!r}, got {cv_scheme!r}"
        )
    if rng is None:
        raise ConfigError("adaptive_lasso requires an rng")
    folds = partition_folds(data.n, n_folds, rng)
    if scheme.kind == UNIT:
        if cv_scheme == NESTED_CV:
            raise ConfigError(
                "unit weights have no pilot stage to nest; use cv_scheme='simple'"
            )
        return simple_cv_lasso(
            data, np.ones(data.p), n_folds, cfg,
            folds=folds, n_lambdas=n_lambdas, min_ratio=min_ratio,
        )
    pilot = _pilot_estimate_shared(data, scheme.kind, n_folds, cfg, folds)
    weights = make_weights(pilot, scheme.epsilon)
    if cv_scheme == SIMPLE_CV:
        return simple_cv_lasso(
            data, weights, n_folds, cfg,
            folds=folds, n_lambdas=n_lambdas, min_ratio=min_ratio,
        )
    return nested_cv_lasso(
        data, weights, scheme, n_folds, cfg, rng,
        folds=folds, path_unit_weights=path_unit_weights,
        n_lambdas=n_lambdas, min_ratio=min_ratio,
    )


def _pilot_estimate_shared(
    data: Dataset,
    kind: str,
    n_folds: int,
    cfg: SolverConfig,
    folds: FoldAssignment,
) -> np.ndarray:
    """Full-data pilot reusing the step-2 fold assignment for its own CV."""
    if kind == OLS:
        return ols_fit(data)
    if kind == RIDGE_CV:
        return simple_cv_ridge(data, n_folds, cfg, folds=folds).beta
    if kind == LASSO_CV:
        return simple_cv_lasso(data, np.ones(data.p), n_folds, cfg, folds=folds).beta
    raise ConfigError(f"no pilot estimator for weight scheme {kind!r}")
