"""Penalized least-squares solvers.

The central routine is :func:`weighted_lasso_fit`, coordinate descent for

    (1/n) * ||y - X beta||^2  +  lambda * sum_j w_j * |beta_j|

with per-coordinate penalty weights ``w_j in [0, +inf]``. An infinite weight
excludes its coordinate: the coefficient is held at exactly zero rather than
being shrunk toward it. The module also provides the closed-form ridge and
OLS fits used to build adaptive weights, penalty-grid construction, and an
independent KKT certificate (:func:`kkt_max_violation`) for checking any
claimed solution without rerunning the solver.

Conventions, derived once and used everywhere:

* coordinate update: ``beta_j <- S(x_j'r_j / n, lambda w_j / 2) / (||x_j||^2/n)``
  where ``r_j`` is the residual excluding coordinate j and ``S`` is the
  soft-thresholding map;
* stationarity at a solution: ``|(2/n) x_j' r| = lambda w_j`` on the active
  set (with matching sign) and ``|(2/n) x_j' r| <= lambda w_j`` off it;
* smallest penalty with an all-zero solution:
  ``lambda_max = max_j 2 |x_j' y| / (n w_j)`` over coordinates with finite
  positive weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    ConfigError,
    ConvergenceError,
    Dataset,
    DegenerateWeightsError,
    ShapeError,
    SingularDesignError,
    UnpenalizedCoordinateError,
    ZeroSignalError,
)

__all__ = [
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
    "ridge_path_fit",
    "ridge_lambda_grid",
]


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs shared by the lasso solver and the CV pipelines.

    ``tol`` bounds the largest coefficient change in a full sweep at
    convergence; the final iterate is additionally certified to satisfy the
    stationarity conditions within ``10 * tol``. ``standardize`` rescales
    columns to unit standard deviation internally (coefficients are always
    reported on the original scale); ``intercept`` adds an unpenalized
    intercept by centering.
    """

    tol: float = 1e-7
    max_sweeps: int = 100_000
    standardize: bool = True
    intercept: bool = False

    def __post_init__(self) -> None:
        if not (self.tol > 0):
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if int(self.max_sweeps) < 1:
            raise ConfigError(f"max_sweeps must be >= 1, got {self.max_sweeps}")


DEFAULT_CONFIG = SolverConfig()


def soft_threshold(z: np.ndarray | float, threshold: float | np.ndarray):
    """Soft-thresholding map ``sign(z) * max(|z| - threshold, 0)``.

    Accepts scalars or arrays; thresholds must be nonnegative.
    """
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(threshold, dtype=np.float64)
    if np.any(t < 0):
        raise ConfigError("soft_threshold requires a nonnegative threshold")
    out = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Input validation and the standardization/centering transform
# ---------------------------------------------------------------------------

def _check_weights(weights: np.ndarray, p: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (p,):
        raise ShapeError(f"weights must have shape ({p},), got {w.shape}")
    if np.any(np.isnan(w)) or np.any(w < 0):
        raise ConfigError("weights must be nonnegative (NaN not allowed)")
    return w


def _working_problem(data: Dataset, cfg: SolverConfig):
    """Return (Xw, yw, scales, x_mean, y_mean) for the problem the solver sees.

    With ``intercept`` the columns and response are mean-centered; with
    ``standardize`` the (centered) columns are divided by their population
    standard deviation. Solving the rescaled problem with weights ``w`` is
    identical to solving the original with effective weights ``w_j * s_j``,
    so coefficients map back by ``beta_j = gamma_j / s_j``. Constant columns
    keep scale 1 and are simply never selected at positive penalties.
    """
    X = data.X
    y = data.y
    if cfg.intercept:
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        X = X - x_mean
        y = y - y_mean
    else:
        x_mean = np.zeros(data.p)
        y_mean = 0.0
    if cfg.standardize:
        scales = X.std(axis=0)
        scales = np.where(scales > 0, scales, 1.0)
        X = X / scales
    else:
        scales = np.ones(data.p)
    return X, y, scales, x_mean, y_mean


def _intercept_for(data: Dataset, beta: np.ndarray, cfg: SolverConfig) -> float:
    if not cfg.intercept:
        return 0.0
    return float(data.y.mean() - data.X.mean(axis=0) @ beta)


# ---------------------------------------------------------------------------
# Coordinate-descent kernel (compiled once, cached on disk)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _cd_sweep(X, w, lam, beta, resid, colsq):  # pragma: no cover
    """One full coordinate sweep; returns the largest |coefficient change|.

    ``resid`` is maintained as y - X @ beta throughout. Coordinates with
    infinite weight or zero column norm are skipped (their beta stays 0).
    """
    n, p = X.shape
    max_delta = 0.0
    for j in range(p):
        wj = w[j]
        if not np.isfinite(wj):
            continue
        a = colsq[j] / n
        if a <= 0.0:
            continue
        z = 0.0
        for i in range(n):
            z += X[i, j] * resid[i]
        z = z / n + a * beta[j]
        t = 0.5 * lam * wj
        if z > t:
            b = (z - t) / a
        elif z < -t:
            b = (z + t) / a
        else:
            b = 0.0
        d = b - beta[j]
        if d != 0.0:
            for i in range(n):
                resid[i] -= X[i, j] * d
            beta[j] = b
            ad = abs(d)
            if ad > max_delta:
                max_delta = ad
    return max_delta


def _activation_levels(Xw: np.ndarray, yw: np.ndarray) -> np.ndarray:
    """Per-coordinate penalty level ``2|x_j'y|/n`` at which j leaves zero.

    Shared between :func:`lambda_max` and the in-solver zero certificate so
    both sides of the ``lam >= lambda_max`` comparison use bit-identical
    arithmetic.
    """
    return 2.0 * np.abs(Xw.T @ yw) / Xw.shape[0]


def _kkt_violation_raw(X: np.ndarray, resid: np.ndarray, w: np.ndarray,
                       lam: float, beta: np.ndarray) -> float:
    """Max stationarity violation for the objective (1/n)||r||^2 + lam*sum w|b|.

    Pure NumPy; shared by the in-solver convergence gate and the public
    certificate. Coordinates with infinite weight must sit exactly at zero.
    """
    n = X.shape[0]
    grad = (2.0 / n) * (X.T @ resid)
    finite = np.isfinite(w)
    if np.any(beta[~finite] != 0.0):
        return float("inf")
    viol = 0.0
    active = finite & (beta != 0.0)
    if np.any(active):
        v = np.abs(grad[active] - lam * w[active] * np.sign(beta[active]))
        viol = max(viol, float(v.max()))
    inactive = finite & (beta == 0.0)
    if np.any(inactive):
        v = np.abs(grad[inactive]) - lam * w[inactive]
        viol = max(viol, float(max(v.max(), 0.0)))
    return viol


def _cd_solve(Xw: np.ndarray, yw: np.ndarray, w: np.ndarray, lam: float,
              beta0: np.ndarray, cfg: SolverConfig) -> tuple[np.ndarray, int]:
    """Run sweeps until max|delta beta| <= tol AND KKT violation <= 10*tol."""
    # If beta = 0 already satisfies the stationarity inequalities, return it
    # exactly: this makes "lam >= lambda_max implies the zero fit" hold
    # without rounding dust from a near-boundary sweep. NaN entries come only
    # from 0/0 (an unpenalized coordinate with zero correlation), which is
    # stationary at zero too.
    with np.errstate(divide="ignore", invalid="ignore"):
        crit = _activation_levels(Xw, yw) / w
    if bool(np.all((crit <= lam) | np.isnan(crit))):
        return np.zeros(Xw.shape[1]), 0
    Xf = np.asfortranarray(Xw)
    beta = beta0.copy()
    beta[~np.isfinite(w)] = 0.0
    resid = yw - Xf @ beta
    colsq = np.einsum("ij,ij->j", Xf, Xf)
    kkt_tol = 10.0 * cfg.tol
    sweeps = 0
    while sweeps < cfg.max_sweeps:
        delta = _cd_sweep(Xf, w, lam, beta, resid, colsq)
        sweeps += 1
        if delta <= cfg.tol:
            # Recompute the residual from scratch so accumulated drift cannot
            # leak into the optimality check.
            resid = yw - Xf @ beta
            if _kkt_violation_raw(Xf, resid, w, lam, beta) <= kkt_tol:
                return beta, sweeps
    raise ConvergenceError(
        f"coordinate descent did not converge in {cfg.max_sweeps} sweeps "
        f"(lambda={lam:g})",
        beta_last=beta,
    )


def weighted_lasso_fit(
    data: Dataset,
    weights: np.ndarray,
    lam: float,
    cfg: SolverConfig = DEFAULT_CONFIG,
    warm_start: np.ndarray | None = None,
) -> np.ndarray:
    """Minimize ``(1/n)||y - X beta||^2 + lam * sum_j w_j |beta_j|``.

    ``weights`` are nonnegative, ``+inf`` entries pin their coefficient to
    exactly zero, and at least one weight must be finite. ``warm_start`` (on
    the original coefficient scale) seeds the iteration. Returns the
    coefficient vector on the original scale; raises
    :class:`ConvergenceError` if the sweep budget runs out.
    """
    w = _check_weights(weights, data.p)
    if not (float(lam) >= 0):
        raise ConfigError(f"lambda must lie in [0, inf), got {lam}")
    if not np.any(np.isfinite(w)):
        raise DegenerateWeightsError(
            "all penalty weights are infinite; the fit is identically zero"
        )
    Xw, yw, scales, _, _ = _working_problem(data, cfg)
    if warm_start is None:
        gamma0 = np.zeros(data.p)
    else:
        ws = np.asarray(warm_start, dtype=np.float64)
        if ws.shape != (data.p,):
            raise ShapeError(f"warm_start must have shape ({data.p},)")
        gamma0 = ws * scales
    try:
        gamma, _ = _cd_solve(Xw, yw, w, float(lam), gamma0, cfg)
    except ConvergenceError as exc:
        if exc.beta_last is not None:
            exc.beta_last = exc.beta_last / scales
        raise
    return gamma / scales


def kkt_max_violation(
    data: Dataset,
    weights: np.ndarray,
    lam: float,
    beta: np.ndarray,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Largest stationarity violation of ``beta`` for the weighted lasso.

    Checks the subgradient conditions of the objective actually solved under
    ``cfg`` (i.e. after any internal standardization/centering): active
    coordinates need gradient ``lam * w_j * sign(beta_j)`` and inactive ones
    need ``|gradient| <= lam * w_j``, where the gradient coordinate is
    ``(2/n) x_j' (y - X beta)``. Returns ``+inf`` if a coordinate with
    infinite weight is nonzero. Independent of the solver iteration, so it
    serves as a certificate for any claimed solution.
    """
    w = _check_weights(weights, data.p)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.p,):
        raise ShapeError(f"beta must have shape ({data.p},), got {beta.shape}")
    Xw, yw, scales, _, _ = _working_problem(data, cfg)
    gamma = beta * scales
    resid = yw - Xw @ gamma
    return _kkt_violation_raw(Xw, resid, w, float(lam), gamma)


# ---------------------------------------------------------------------------
# Penalty grids and path fitting
# ---------------------------------------------------------------------------

def lambda_max(data: Dataset, weights: np.ndarray,
               cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Smallest penalty level at which the weighted-lasso fit is all zeros.

    Equals ``max_j 2 |x_j' y| / (n w_j)`` over coordinates with finite,
    strictly positive weight, computed on the same internally transformed
    problem the solver uses under ``cfg``. Zero weights make the threshold
    undefined (:class:`UnpenalizedCoordinateError`); all-infinite weights or
    an identically zero ``X'y`` are rejected too, since no finite positive
    threshold exists.
    """
    w = _check_weights(weights, data.p)
    if np.any(w == 0):
        raise UnpenalizedCoordinateError(
            "zero penalty weight: that coordinate is active at every lambda"
        )
    finite = np.isfinite(w)
    if not np.any(finite):
        raise DegenerateWeightsError("all penalty weights are infinite")
    Xw, yw, _, _, _ = _working_problem(data, cfg)
    corr = _activation_levels(Xw, yw)
    cand = corr[finite] / w[finite]
    lmax = float(cand.max())
    if lmax <= 0:
        raise ZeroSignalError("X'y is zero on every penalized coordinate")
    return lmax


def build_lambda_path(
    data: Dataset,
    weights: np.ndarray,
    n_lambdas: int = 100,
    min_ratio: float | None = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Log-spaced decreasing penalty grid from ``lambda_max`` downward.

    The grid has ``n_lambdas`` points from ``lambda_max(data, weights)`` down
    to ``min_ratio * lambda_max``. The default ``min_ratio`` is 1e-4 when
    n > p and 1e-2 otherwise (stopping earlier in the saturated regime where
    small penalties produce degenerate interpolating fits).
    """
    if int(n_lambdas) < 2:
        raise ConfigError(f"n_lambdas must be >= 2, got {n_lambdas}")
    if min_ratio is None:
        min_ratio = 1e-4 if data.n > data.p else 1e-2
    if not (0 < min_ratio < 1):
        raise ConfigError(f"min_ratio must lie in (0, 1), got {min_ratio}")
    lmax = lambda_max(data, weights, cfg)
    path = np.geomspace(lmax, lmax * min_ratio, int(n_lambdas))
    path[0] = lmax  # exact endpoint, no rounding from geomspace
    return path


def _validate_path(path: np.ndarray) -> np.ndarray:
    path = np.asarray(path, dtype=np.float64)
    if path.ndim != 1 or path.shape[0] < 1:
        raise ShapeError("lambda path must be a nonempty 1-d array")
    if np.any(path <= 0) or np.any(np.diff(path) >= 0):
        raise ConfigError("lambda path must be positive and strictly decreasing")
    return path


def lasso_path_fit(
    data: Dataset,
    weights: np.ndarray,
    path: np.ndarray,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Weighted-lasso fits along a decreasing penalty path, warm-started.

    Returns an array of shape ``(len(path), p)`` whose r-th row solves the
    problem at ``path[r]``. Each fit starts from the previous solution, which
    is the standard trick for decreasing grids; every row still satisfies the
    same convergence criteria as a cold-started :func:`weighted_lasso_fit`.
    """
    path = _validate_path(path)
    w = _check_weights(weights, data.p)
    if not np.any(np.isfinite(w)):
        raise DegenerateWeightsError("all penalty weights are infinite")
    Xw, yw, scales, _, _ = _working_problem(data, cfg)
    out = np.empty((path.shape[0], data.p))
    gamma = np.zeros(data.p)
    for r, lam in enumerate(path):
        gamma, _ = _cd_solve(Xw, yw, w, float(lam), gamma, cfg)
        out[r] = gamma / scales
    return out


# ---------------------------------------------------------------------------
# Closed-form pilot estimators
# ---------------------------------------------------------------------------

def ols_fit(data: Dataset) -> np.ndarray:
    """Ordinary least squares via ``lstsq``; requires full column rank (p < n)."""
    if data.p >= data.n:
        raise SingularDesignError(
            f"OLS needs p < n, got p={data.p}, n={data.n}"
        )
    beta, _, rank, _ = np.linalg.lstsq(data.X, data.y, rcond=None)
    if rank < data.p:
        raise SingularDesignError(
            f"design matrix is rank deficient (rank {rank} < p={data.p})"
        )
    return beta


def ridge_fit(data: Dataset, lam: float) -> np.ndarray:
    """Ridge solution ``(X'X + n*lam*I)^{-1} X'y`` via SVD (any n, p)."""
    lam = float(lam)
    if not lam > 0:
        raise ConfigError(f"ridge lambda must be positive, got {lam}")
    U, s, Vt = np.linalg.svd(data.X, full_matrices=False)
    d = s / (s * s + data.n * lam)
    return Vt.T @ (d * (U.T @ data.y))


def ridge_path_fit(data: Dataset, lambdas: np.ndarray) -> np.ndarray:
    """Ridge solutions for several penalty levels from a single SVD."""
    lambdas = _validate_path(np.asarray(lambdas, dtype=np.float64))
    U, s, Vt = np.linalg.svd(data.X, full_matrices=False)
    uty = U.T @ data.y
    out = np.empty((lambdas.shape[0], data.p))
    for r, lam in enumerate(lambdas):
        out[r] = Vt.T @ ((s / (s * s + data.n * lam)) * uty)
    return out


def ridge_lambda_grid(data: Dataset, n_lambdas: int = 100,
                      min_ratio: float = 1e-4) -> np.ndarray:
    """Decreasing log-spaced ridge grid anchored at ``10*||X'y||_inf / n``.

    Ridge has no finite penalty that zeroes the fit, so the top of the grid
    is a heavy-shrinkage anchor ten times the lasso-style scale.
    """
    if int(n_lambdas) < 2:
        raise ConfigError(f"n_lambdas must be >= 2, got {n_lambdas}")
    top = 10.0 * float(np.abs(data.X.T @ data.y).max()) / data.n
    if top <= 0:
        raise ZeroSignalError("X'y is identically zero; ridge grid undefined")
    grid = np.geomspace(top, top * min_ratio, int(n_lambdas))
    grid[0] = top
    return grid
