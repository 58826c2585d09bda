"""Regression error measures.

Metrics:
- mean squared error (mse)
- root mean squared error (rmse)
- mean absolute error (mae)
- mean absolute percentage error (mape, in percent)

MAPE averages the per-point ratios |true_i - pred_i| / |true_i|; a zero
true value is a hard error rather than a silently skipped point, because
dropping points would misstate n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MetricError

Vector = Sequence[float] | np.ndarray


@dataclass(frozen=True)
class MetricsReport:
    """The four error measures plus the number of scored points."""

    mse: float
    rmse: float
    mae: float
    mape: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MetricError(f"metrics need at least one point, got n={self.n}")
        for name in ("mse", "rmse", "mae", "mape"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise MetricError(f"{name} must be finite and non-negative, got {value}")
        if abs(self.rmse * self.rmse - self.mse) > 1e-12 * max(self.mse, 1e-300):
            raise MetricError(f"rmse^2 != mse: {self.rmse}^2 vs {self.mse}")
        if self.mae > self.rmse + 1e-12:
            raise MetricError(f"mae {self.mae} exceeds rmse {self.rmse}")

    def to_json_dict(self) -> dict:
        return {
            "mse": self.mse,
            "rmse": self.rmse,
            "mae": self.mae,
            "mape": self.mape,
            "n": self.n,
        }

    @classmethod
    def from_json_dict(cls, document: dict) -> "MetricsReport":
        return cls(
            mse=float(document["mse"]),
            rmse=float(document["rmse"]),
            mae=float(document["mae"]),
            mape=float(document["mape"]),
            n=int(document["n"]),
        )


def _paired(true: Vector, pred: Vector) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(true, dtype=float)
    p = np.asarray(pred, dtype=float)
    if t.ndim != 1 or p.ndim != 1:
        raise MetricError("metrics expect 1-D inputs")
    if t.shape[0] != p.shape[0]:
        raise MetricError(f"length mismatch: {t.shape[0]} true vs {p.shape[0]} predicted")
    if t.shape[0] == 0:
        raise MetricError("metrics need at least one point")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
        raise MetricError("metrics inputs must be finite")
    return t, p


def mse(true: Vector, pred: Vector) -> float:
    """Mean of squared differences."""
    t, p = _paired(true, pred)
    return float(np.mean((t - p) ** 2))


def rmse(true: Vector, pred: Vector) -> float:
    """Square root of the mean squared error."""
    return math.sqrt(mse(true, pred))


def mae(true: Vector, pred: Vector) -> float:
    """Mean of absolute differences."""
    t, p = _paired(true, pred)
    return float(np.mean(np.abs(t - p)))


def mape(true: Vector, pred: Vector) -> float:
    """Mean of per-point |error| / |true|, in percent. Zero true values are an error."""
    t, p = _paired(true, pred)
    zeros = np.flatnonzero(t == 0.0)
    if zeros.size:
        raise MetricError(f"true value of zero at index {int(zeros[0])}; percentage undefined")
    return float(np.mean(np.abs(t - p) / np.abs(t)) * 100.0)


def score(true: Vector, pred: Vector) -> MetricsReport:
    """Bundle all four metrics; rmse is sqrt(mse) by construction."""
    t, p = _paired(true, pred)
    mean_square = float(np.mean((t - p) ** 2))
    return MetricsReport(
        mse=mean_square,
        rmse=math.sqrt(mean_square),
        mae=float(np.mean(np.abs(t - p))),
        mape=mape(t, p),
        n=int(t.shape[0]),
    )
