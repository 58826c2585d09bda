"""Pearson correlation of panel columns and full correlation matrices.

Correlations are computed on close-price levels, matching the regression
features; that choice is a known econometric caveat (levels of trending
series correlate strongly) and is documented rather than hidden behind a
returns transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import StatsError
from .panel import AlignedPanel, ColumnKey

ENTRY_SLACK = 1e-12


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric matrix of pairwise Pearson coefficients with unit diagonal."""

    labels: tuple[ColumnKey, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        n = len(self.labels)
        if values.shape != (n, n):
            raise StatsError(f"matrix shape {values.shape} does not match {n} labels")
        if not np.all(np.isfinite(values)):
            raise StatsError("correlation matrix contains non-finite entries")
        if np.any(np.abs(values) > 1.0 + ENTRY_SLACK):
            raise StatsError("correlation entry outside [-1, 1]")
        if not np.array_equal(values, values.T):
            raise StatsError("correlation matrix is not symmetric")
        if not np.all(values.diagonal() == 1.0):
            raise StatsError("correlation matrix diagonal is not exactly 1")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))

    def entry(self, a: ColumnKey, b: ColumnKey) -> float:
        index = {label: i for i, label in enumerate(self.labels)}
        return float(self.values[index[a], index[b]])


def covariance(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Sample covariance with the n-1 normalization.

    A diagnostic intermediate only: pearson() divides it out again, so the
    normalization choice never reaches a correlation value.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1:
        raise StatsError("covariance expects 1-D inputs")
    if xa.shape[0] != ya.shape[0]:
        raise StatsError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < 2:
        raise StatsError("covariance requires at least 2 points")
    return float((xa - xa.mean()) @ (ya - ya.mean())) / (xa.shape[0] - 1)


def pearson(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Sample Pearson r = cov(x, y) / (sigma_x * sigma_y).

    The normalization constant cancels between numerator and denominator,
    so the sums are used directly. The result is clamped to [-1, 1] only
    to absorb last-ulp overshoot.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1:
        raise StatsError("pearson expects 1-D inputs")
    if xa.shape[0] != ya.shape[0]:
        raise StatsError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < 2:
        raise StatsError("pearson requires at least 2 points")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0:
        raise StatsError("zero variance in first input")
    if syy == 0.0:
        raise StatsError("zero variance in second input")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def correlation_matrix(panel: AlignedPanel, keys: Iterable[ColumnKey]) -> CorrelationMatrix:
    """Pairwise Pearson matrix over the selected panel columns.

    The diagonal is forced to exactly 1; failures name the offending
    column or pair.
    """
    labels = tuple(keys)
    if not labels:
        raise StatsError("correlation_matrix requires at least one column key")
    if panel.n_rows < 2:
        raise StatsError("correlation_matrix requires at least 2 panel rows")
    columns = [panel.column(key) for key in labels]
    for key, col in zip(labels, columns):
        if float(np.var(col)) == 0.0:
            raise StatsError(f"column {key.name} has zero variance")

    n = len(labels)
    values = np.ones((n, n), dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                r = pearson(columns[i], columns[j])
            except StatsError as exc:
                raise StatsError(f"{labels[i].name} vs {labels[j].name}: {exc}") from exc
            values[i, j] = values[j, i] = r
    return CorrelationMatrix(labels, values)


def matrix_to_csv_bytes(matrix: CorrelationMatrix) -> bytes:
    """CSV with a label header row and a label first column."""
    names = [label.name for label in matrix.labels]
    lines = ["," + ",".join(names)]
    for name, row in zip(names, matrix.values):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def matrix_to_long_records(matrix: CorrelationMatrix) -> list[tuple[str, str, float]]:
    """Full-grid (label_i, label_j, r) triples for external heatmap tools."""
    names = [label.name for label in matrix.labels]
    return [
        (names[i], names[j], float(matrix.values[i, j]))
        for i in range(len(names))
        for j in range(len(names))
    ]


def matrix_to_json_dict(matrix: CorrelationMatrix) -> dict:
    return {
        "labels": [label.name for label in matrix.labels],
        "values": [[float(v) for v in row] for row in matrix.values],
    }


def matrix_from_json_dict(document: dict) -> CorrelationMatrix:
    labels = tuple(ColumnKey.parse(name) for name in document["labels"])
    return CorrelationMatrix(labels, np.array(document["values"], dtype=float))
