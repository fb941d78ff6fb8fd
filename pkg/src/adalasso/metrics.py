"""Evaluation metrics: prediction error and support-recovery scores."""

from __future__ import annotations

import numpy as np

from .core import Dataset, ShapeError

__all__ = [
    "pred_error",
    "signed_support_accuracy",
    "precision_recall",
]


def _check_pair(beta_true: np.ndarray, beta_hat: np.ndarray):
    bt = np.asarray(beta_true, dtype=np.float64)
    bh = np.asarray(beta_hat, dtype=np.float64)
    if bt.ndim != 1 or bt.shape != bh.shape:
        raise ShapeError(
            f"coefficient vectors must share one shape, got {bt.shape} vs {bh.shape}"
        )
    return bt, bh


def pred_error(data: Dataset, beta: np.ndarray, intercept: float = 0.0) -> float:
    """Mean squared prediction error ``mean((y - X @ beta - intercept)^2)``."""
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.p,):
        raise ShapeError(f"beta must have shape ({data.p},), got {beta.shape}")
    resid = data.y - data.X @ beta - float(intercept)
    return float(np.mean(resid * resid))


def signed_support_accuracy(beta_true: np.ndarray, beta_hat: np.ndarray) -> float:
    """Fraction of coordinates whose sign (-1, 0, +1) is recovered exactly."""
    bt, bh = _check_pair(beta_true, beta_hat)
    return float(np.mean(np.sign(bt) == np.sign(bh)))


def precision_recall(beta_true: np.ndarray, beta_hat: np.ndarray) -> tuple[float, float]:
    """Support precision and recall of ``beta_hat`` against ``beta_true``.

    Precision = |S_hat & S*| / |S_hat| and recall = |S_hat & S*| / |S*| over
    the nonzero supports. An empty estimated support makes precision
    undefined and it is returned as NaN (callers aggregate by exclusion);
    an empty true support likewise yields NaN recall.
    """
    bt, bh = _check_pair(beta_true, beta_hat)
    s_true = bt != 0
    s_hat = bh != 0
    hits = float(np.sum(s_true & s_hat))
    precision = hits / s_hat.sum() if s_hat.any() else float("nan")
    recall = hits / s_true.sum() if s_true.any() else float("nan")
    return precision, recall
