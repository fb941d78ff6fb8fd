"""Shared domain types: datasets, fold assignments, CV curves, RNG helpers, CSV I/O.

Everything downstream (solvers, calibration, simulation harness) builds on the
types defined here. All array-carrying types copy their inputs and mark the
copies read-only, so instances are safe to share across folds and worker
processes without defensive copying at the call sites.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
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
    "ZeroSignalError",
    "UnpenalizedCoordinateError",
    "Dataset",
    "FoldAssignment",
    "CvCurve",
    "seeded_rng",
    "partition_folds",
    "read_dataset_csv",
    "write_dataset_csv",
]


# ---------------------------------------------------------------------------
# Exception hierarchy
# ---------------------------------------------------------------------------

class AdalassoError(Exception):
    """Base class for every error this package raises deliberately."""


class ConfigError(AdalassoError):
    """Invalid option, flag, or configuration value (CLI exit code 2)."""


class DataError(AdalassoError):
    """Malformed or unusable input data (CLI exit code 3)."""


class ShapeError(DataError):
    """Array arguments with incompatible shapes."""


class InvalidCovarianceError(DataError):
    """Covariance matrix input that is not square/symmetric/PSD."""


class InvalidFoldsError(ConfigError):
    """Fold count outside the valid range 2 <= K <= n."""


class NumericalError(AdalassoError):
    """Numerical failure inside a solver (CLI exit code 4)."""


class ConvergenceError(NumericalError):
    """Coordinate descent hit the sweep budget before meeting tolerance.

    Carries the last iterate in ``beta_last`` for diagnostics.
    """

    def __init__(self, message: str, beta_last: np.ndarray | None = None):
        super().__init__(message)
        self.beta_last = beta_last


class DegenerateWeightsError(NumericalError):
    """Every penalty weight is infinite: all coefficients are forced to zero."""


class SingularDesignError(NumericalError):
    """Least-squares subproblem is rank deficient (e.g. p >= n for OLS)."""


class ZeroSignalError(NumericalError):
    """X'y is identically zero, so no penalty level activates any coordinate."""


class UnpenalizedCoordinateError(NumericalError):
    """A zero penalty weight makes the smallest-active penalty level undefined."""


# ---------------------------------------------------------------------------
# Core data types
# ---------------------------------------------------------------------------

def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """A regression sample: response vector ``y`` and dense design matrix ``X``.

    ``y`` has shape ``(n,)``, ``X`` has shape ``(n, p)`` with ``n, p >= 1``.
    Both are validated to be finite, copied, and frozen at construction.
    """

    y: np.ndarray
    X: np.ndarray

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64)
        X = np.asarray(self.X, dtype=np.float64)
        if y.ndim != 1:
            raise ShapeError(f"y must be 1-d, got shape {y.shape}")
        if X.ndim != 2:
            raise ShapeError(f"X must be 2-d, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if y.shape[0] < 1 or X.shape[1] < 1:
            raise ShapeError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(y)) or not np.all(np.isfinite(X)):
            raise DataError("dataset contains NaN or infinite values")
        object.__setattr__(self, "y", _freeze(y))
        object.__setattr__(self, "X", _freeze(X))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def rows(self, idx: np.ndarray) -> "Dataset":
        """New Dataset holding the given rows (copies)."""
        return Dataset(self.y[idx], self.X[idx])


@dataclass(frozen=True)
class FoldAssignment:
    """Partition of row indices ``0..n-1`` into ``n_folds`` balanced folds.

    ``fold_of[i]`` is the fold id of row ``i``; fold sizes differ by at most
    one. Use :func:`partition_folds` to build one from an RNG.
    """

    fold_of: np.ndarray
    n_folds: int

    def __post_init__(self) -> None:
        fold_of = np.asarray(self.fold_of, dtype=np.int64)
        n = fold_of.shape[0]
        if fold_of.ndim != 1 or n < 1:
            raise ShapeError("fold_of must be a nonempty 1-d integer array")
        if not (2 <= self.n_folds <= n):
            raise InvalidFoldsError(
                f"n_folds must satisfy 2 <= K <= n; got K={self.n_folds}, n={n}"
            )
        if fold_of.min() < 0 or fold_of.max() >= self.n_folds:
            raise ShapeError("fold ids must lie in [0, n_folds)")
        sizes = np.bincount(fold_of, minlength=self.n_folds)
        if sizes.min() < 1 or sizes.max() - sizes.min() > 1:
            raise InvalidFoldsError(
                f"fold sizes must differ by at most one, got {sizes.tolist()}"
            )
        fold_of = fold_of.copy()
        fold_of.setflags(write=False)
        object.__setattr__(self, "fold_of", fold_of)

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]

    def test_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == k)

    def train_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != k)

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.n_folds)


@dataclass(frozen=True)
class CvCurve:
    """Cross-validation error profile over a decreasing penalty grid.

    ``fold_errors[r, k]`` is the mean squared prediction error of the model
    fitted at ``lambdas[r]`` on the k-th held-out fold; ``mean_errors`` is the
    plain mean over folds. ``selected_index`` is the smallest index attaining
    the minimum mean error, i.e. ties resolve toward the larger penalty.
    """

    lambdas: np.ndarray
    fold_errors: np.ndarray
    mean_errors: np.ndarray = field(default=None)  # type: ignore[assignment]
    selected_index: int = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=np.float64)
        fe = np.asarray(self.fold_errors, dtype=np.float64)
        if lambdas.ndim != 1 or lambdas.shape[0] < 1:
            raise ShapeError("lambdas must be a nonempty 1-d array")
        if np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
            raise ConfigError("lambdas must be strictly decreasing and positive")
        if fe.ndim != 2 or fe.shape[0] != lambdas.shape[0] or fe.shape[1] < 2:
            raise ShapeError(
                f"fold_errors must have shape (len(lambdas), K>=2), got {fe.shape}"
            )
        if not np.all(np.isfinite(fe)) or fe.min() < 0:
            raise DataError("fold errors must be finite and nonnegative")
        mean = fe.mean(axis=1)
        sel = int(np.argmin(mean))  # np.argmin returns the first minimizer
        if self.mean_errors is not None:
            given = np.asarray(self.mean_errors, dtype=np.float64)
            if given.shape != mean.shape or not np.allclose(given, mean, rtol=1e-12, atol=0):
                raise DataError("mean_errors does not match the mean over folds")
        if self.selected_index is not None and int(self.selected_index) != sel:
            raise DataError(
                f"selected_index {self.selected_index} is not the first argmin {sel}"
            )
        object.__setattr__(self, "lambdas", _freeze(lambdas))
        object.__setattr__(self, "fold_errors", _freeze(fe))
        object.__setattr__(self, "mean_errors", _freeze(mean))
        object.__setattr__(self, "selected_index", sel)

    @property
    def selected_lambda(self) -> float:
        return float(self.lambdas[self.selected_index])


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------

def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic random generator (NumPy PCG64) for a nonnegative seed.

    The same seed yields the same stream across runs and platforms. Derived
    independent streams for parallel work should come from ``rng.spawn(k)``
    or from ``np.random.SeedSequence(seed, spawn_key=...)``, never by reusing
    one generator concurrently.
    """
    seed = int(seed)
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.default_rng(seed)


def partition_folds(n: int, n_folds: int, rng: np.random.Generator) -> FoldAssignment:
    """Draw a balanced K-fold partition of ``0..n-1`` from ``rng``.

    Rows are shuffled once and dealt round-robin, so fold sizes differ by at
    most one and the result depends only on the generator state.
    """
    n = int(n)
    if not (2 <= n_folds <= n):
        raise InvalidFoldsError(
            f"n_folds must satisfy 2 <= K <= n; got K={n_folds}, n={n}"
        )
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n, dtype=np.int64) % n_folds
    return FoldAssignment(fold_of=fold_of, n_folds=int(n_folds))


# ---------------------------------------------------------------------------
# Dataset CSV I/O
# ---------------------------------------------------------------------------
# Layout: first column is the response, remaining columns are predictors.
# An optional single header row is allowed and skipped when has_header=True.

def read_dataset_csv(path: str, has_header: bool = False) -> Dataset:
    """Read a dataset from CSV (first column y, remaining columns X).

    Raises :class:`DataError` naming the first offending line for ragged rows
    or non-numeric fields.
    """
    rows: list[list[float]] = []
    width: int | None = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 and has_header:
                continue
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue  # ignore blank lines
            if width is None:
                width = len(row)
                if width < 2:
                    raise DataError(
                        f"{path}: line {lineno}: need at least 2 columns "
                        "(response + one predictor)"
                    )
            elif len(row) != width:
                raise DataError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(row)}"
                )
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise DataError(
                    f"{path}: line {lineno}: non-numeric field {bad!r}"
                ) from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    try:
        return Dataset(y=arr[:, 0], X=arr[:, 1:])
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def write_dataset_csv(path: str, data: Dataset, header: bool = False) -> None:
    """Write a dataset as CSV in the same layout ``read_dataset_csv`` expects."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(["y"] + [f"x{j}" for j in range(1, data.p + 1)])
        for i in range(data.n):
            writer.writerow([repr(float(data.y[i]))]
                            + [repr(float(v)) for v in data.X[i]])
