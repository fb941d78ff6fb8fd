"""Synthetic data for the linear model ``y = X beta* + noise``.

Rows of X are i.i.d. ``N(0, Sigma)`` with Sigma either the identity, a
geometric-decay matrix ``Sigma[k, j] = rho ** |k - j|``, or a user-supplied
matrix loaded from CSV. The true coefficient vector has ``p0`` nonzero
entries of magnitude ``beta_mag`` with independent random signs, placed
either on the first ``p0`` coordinates or on a uniformly drawn subset.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigError,
    Dataset,
    InvalidCovarianceError,
)

__all__ = [
    "CovarianceSpec",
    "SimDesign",
    "build_covariance",
    "covariance_factor",
    "read_covariance_csv",
    "draw_beta_star",
    "sample_dataset",
    "standin_covariance",
]

FIRST = "first"
RANDOM = "random"


@dataclass(frozen=True)
class CovarianceSpec:
    """Which predictor covariance to use: identity, ar_decay(rho), or a file."""

    kind: str
    rho: float = 0.0
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "ar_decay", "file"):
            raise ConfigError(f"unknown covariance kind {self.kind!r}")
        if self.kind == "ar_decay" and not (0.0 <= self.rho < 1.0):
            raise ConfigError(f"ar_decay needs 0 <= rho < 1, got {self.rho}")
        if self.kind == "file" and not self.path:
            raise ConfigError("file covariance needs a path")

    @classmethod
    def identity(cls) -> "CovarianceSpec":
        return cls("identity")

    @classmethod
    def ar_decay(cls, rho: float) -> "CovarianceSpec":
        return cls("ar_decay", rho=float(rho))

    @classmethod
    def from_file(cls, path: str) -> "CovarianceSpec":
        return cls("file", path=str(path))


@dataclass(frozen=True)
class SimDesign:
    """Population for one simulation cell.

    ``p0`` coordinates of the truth carry ``+/- beta_mag`` (random signs);
    ``support`` places them on the first ``p0`` coordinates ("first") or on
    a uniform random subset ("random"). ``noise_sd`` is the standard
    deviation of the additive Gaussian noise.
    """

    n: int
    p: int
    p0: int
    beta_mag: float
    cov: CovarianceSpec
    noise_sd: float = 1.0
    support: str = FIRST

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise ConfigError(f"need n >= 1 and p >= 1, got n={self.n}, p={self.p}")
        if not (0 <= self.p0 <= self.p):
            raise ConfigError(f"need 0 <= p0 <= p, got p0={self.p0}, p={self.p}")
        if not (float(self.beta_mag) > 0):
            raise ConfigError(f"beta_mag must be positive, got {self.beta_mag}")
        if not (float(self.noise_sd) >= 0):
            raise ConfigError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.support not in (FIRST, RANDOM):
            raise ConfigError(
                f"support must be '{FIRST}' or '{RANDOM}', got {self.support!r}"
            )


def read_covariance_csv(path: str, p: int | None = None) -> np.ndarray:
    """Load a covariance matrix from a headerless CSV of numbers.

    Validates squareness, symmetry (within 1e-8 relative), and positive
    semidefiniteness (smallest eigenvalue >= -1e-8 * largest).
    """
    try:
        mat = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise InvalidCovarianceError(f"{path}: {exc}") from None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidCovarianceError(
            f"{path}: covariance must be square, got shape {mat.shape}"
        )
    if p is not None and mat.shape[0] != p:
        raise InvalidCovarianceError(
            f"{path}: covariance is {mat.shape[0]}x{mat.shape[0]}, expected p={p}"
        )
    if not np.all(np.isfinite(mat)):
        raise InvalidCovarianceError(f"{path}: covariance has non-finite entries")
    scale = max(float(np.abs(mat).max()), 1.0)
    if not np.allclose(mat, mat.T, rtol=0, atol=1e-8 * scale):
        raise InvalidCovarianceError(f"{path}: covariance is not symmetric")
    mat = 0.5 * (mat + mat.T)
    eigmin = float(np.linalg.eigvalsh(mat).min())
    eigmax = float(np.linalg.eigvalsh(mat).max())
    if eigmin < -1e-8 * max(eigmax, 1.0):
        raise InvalidCovarianceError(
            f"{path}: covariance is not positive semidefinite "
            f"(min eigenvalue {eigmin:g})"
        )
    return mat


def build_covariance(design: SimDesign) -> np.ndarray:
    """Materialize the p x p covariance matrix for a design."""
    p = design.p
    cov = design.cov
    if cov.kind == "identity":
        return np.eye(p)
    if cov.kind == "ar_decay":
        idx = np.arange(p)
        return cov.rho ** np.abs(idx[:, None] - idx[None, :])
    return read_covariance_csv(cov.path, p=p)


def covariance_factor(sigma: np.ndarray) -> np.ndarray:
    """A matrix L with ``L @ L.T = sigma``, for drawing correlated Gaussians.

    Tries Cholesky; on failure (semidefinite or mildly indefinite input from
    rounding) falls back to an eigendecomposition with eigenvalues clipped
    at 1e-10, and warns that the factorization is approximate.
    """
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
        clipped = np.clip(vals, 1e-10, None)
        warnings.warn(
            "covariance is not positive definite; using eigenvalue-clipped "
            "factor (floor 1e-10)",
            RuntimeWarning,
            stacklevel=2,
        )
        return vecs * np.sqrt(clipped)


def draw_beta_star(design: SimDesign, rng: np.random.Generator) -> np.ndarray:
    """Draw the true coefficient vector: p0 signed spikes of size beta_mag."""
    beta = np.zeros(design.p)
    if design.p0 == 0:
        return beta
    if design.support == FIRST:
        idx = np.arange(design.p0)
    else:
        idx = rng.choice(design.p, size=design.p0, replace=False)
    signs = rng.choice(np.array([-1.0, 1.0]), size=design.p0)
    beta[idx] = signs * design.beta_mag
    return beta


def sample_dataset(
    design: SimDesign,
    beta_star: np.ndarray,
    m: int,
    rng: np.random.Generator,
    factor: np.ndarray | None = None,
) -> Dataset:
    """Draw ``m`` rows from the design's population given the truth.

    ``factor`` can carry a precomputed covariance factor (from
    :func:`covariance_factor`) to avoid refactorizing per draw.
    """
    if m < 1:
        raise ConfigError(f"sample size must be >= 1, got {m}")
    beta_star = np.asarray(beta_star, dtype=np.float64)
    if beta_star.shape != (design.p,):
        raise ConfigError(
            f"beta_star must have shape ({design.p},), got {beta_star.shape}"
        )
    Z = rng.standard_normal((m, design.p))
    if design.cov.kind == "identity":
        X = Z
    else:
        if factor is None:
            factor = covariance_factor(build_covariance(design))
        X = Z @ factor.T
    noise = design.noise_sd * rng.standard_normal(m)
    return Dataset(y=X @ beta_star + noise, X=X)


def standin_covariance(p: int = 44, rho: float = 0.6) -> np.ndarray:
    """Documented stand-in covariance: geometric decay ``rho**|k-j|``.

    For workflows that call for an empirical correlation structure among a
    few dozen predictors when no such matrix is shipped; 44 factors with
    moderate decay is the default swap-in. Replace with a real matrix via
    ``CovarianceSpec.from_file`` when one is available.
    """
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])
