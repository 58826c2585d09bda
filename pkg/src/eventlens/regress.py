"""Ordinary least squares on panel columns.

The model is close = w0 + w1*x1 + ... + wN*xN fit by minimizing the sum
of squared residuals. The solve goes through an orthogonal decomposition
(SVD) of the design matrix rather than the normal equations, which would
square the condition number; the normal-equations route is reserved for
test oracles. Rank deficiency is a hard error, never silently
regularized: a ridge epsilon exists only for deliberately ill-posed
experiments and defaults to off.

Features are not standardized. OLS predictions are affine-equivariant, so
scaling is cosmetic, and raw weights stay comparable to quote units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FitError, PanelError
from .panel import AlignedPanel, BarField, ColumnKey

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class FeatureSpec:
    """A prediction target plus the ordered feature columns used for it."""

    target: ColumnKey
    features: tuple[ColumnKey, ...]
    include_intercept: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        if not self.features:
            raise ConfigError(f"feature list for {self.target.name} is empty")
        if self.target.field is not BarField.CLOSE:
            raise ConfigError(f"target must be a close column, got {self.target.name}")
        if len(set(self.features)) != len(self.features):
            raise ConfigError(f"duplicate feature columns for {self.target.name}")
        if self.target in self.features:
            raise ConfigError(f"target {self.target.name} may not be its own feature")

    @property
    def n_coefficients(self) -> int:
        return len(self.features) + (1 if self.include_intercept else 0)


@dataclass(frozen=True)
class FitDiagnostics:
    residual_sum_of_squares: float
    training_rows: int
    condition_estimate: float


@dataclass(frozen=True)
class RegressionModel:
    """Fitted weights for a FeatureSpec; the intercept, if any, is stored first."""

    spec: FeatureSpec
    weights: np.ndarray
    diagnostics: FitDiagnostics

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if weights.shape != (self.spec.n_coefficients,):
            raise FitError(
                f"expected {self.spec.n_coefficients} weights, got {weights.shape}"
            )
        if not np.all(np.isfinite(weights)):
            raise FitError("model weights must be finite")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)


def _feature_column(panel: AlignedPanel, key: ColumnKey) -> np.ndarray:
    try:
        return panel.column(key)
    except PanelError as exc:
        raise FitError(str(exc)) from exc


def design_matrix(panel: AlignedPanel, spec: FeatureSpec) -> np.ndarray:
    """Feature columns in spec order, with a constant-1 column prepended
    when the spec includes an intercept."""
    columns = [_feature_column(panel, key) for key in spec.features]
    if spec.include_intercept:
        columns.insert(0, np.ones(panel.n_rows))
    return np.column_stack(columns)


def fit_ols(panel: AlignedPanel, spec: FeatureSpec, ridge: float = 0.0) -> RegressionModel:
    """Fit the spec on the panel by least squares.

    Raises FitError when rows are fewer than coefficients, when a feature
    column exactly duplicates the target values, or when the design's
    condition estimate exceeds CONDITION_LIMIT (with ridge off).
    """
    if ridge < 0.0:
        raise ConfigError(f"ridge must be >= 0, got {ridge}")
    y = _feature_column(panel, spec.target)
    for key in spec.features:
        if np.array_equal(_feature_column(panel, key), y):
            raise FitError(f"feature {key.name} is an exact copy of the target values")

    X = design_matrix(panel, spec)
    n_rows, n_coef = X.shape
    if n_rows < n_coef:
        raise FitError(f"too few rows: {n_rows} rows for {n_coef} coefficients")

    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    condition = float(s[0] / s[-1]) if s[-1] > 0.0 else float("inf")
    if ridge == 0.0:
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise FitError(
                f"rank-deficient design for {spec.target.name}: "
                f"condition estimate {condition:.6e} exceeds {CONDITION_LIMIT:.0e}"
            )
        weights = Vt.T @ ((U.T @ y) / s)
    else:
        weights = Vt.T @ ((s * (U.T @ y)) / (s * s + ridge))

    residual = y - X @ weights
    return RegressionModel(
        spec=spec,
        weights=weights,
        diagnostics=FitDiagnostics(
            residual_sum_of_squares=float(residual @ residual),
            training_rows=n_rows,
            condition_estimate=condition,
        ),
    )


def predict(model: RegressionModel, panel: AlignedPanel) -> np.ndarray:
    """One point prediction per panel row: intercept + dot(weights, features)."""
    X = np.column_stack([_feature_column(panel, key) for key in model.spec.features])
    if model.spec.include_intercept:
        return X @ model.weights[1:] + model.weights[0]
    return X @ model.weights


def standardized_weights(model: RegressionModel, panel: AlignedPanel) -> dict[str, float]:
    """Diagnostic view of the weights in per-standard-deviation units.

    Each feature weight is rescaled by sd(feature)/sd(target) over the
    given panel, making magnitudes comparable across differently scaled
    quote units. Purely cosmetic: the fit itself never standardizes.
    """
    target = _feature_column(panel, model.spec.target)
    target_sd = float(np.std(target, ddof=1))
    if target_sd == 0.0:
        raise FitError(f"target {model.spec.target.name} has zero variance")
    offset = 1 if model.spec.include_intercept else 0
    scaled = {}
    for i, key in enumerate(model.spec.features):
        feature_sd = float(np.std(_feature_column(panel, key), ddof=1))
        scaled[key.name] = float(model.weights[offset + i]) * feature_sd / target_sd
    return scaled


def model_to_json_dict(model: RegressionModel) -> dict:
    return {
        "spec": {
            "target": model.spec.target.name,
            "features": [key.name for key in model.spec.features],
            "include_intercept": model.spec.include_intercept,
        },
        "weights": [float(w) for w in model.weights],
        "diagnostics": {
            "residual_sum_of_squares": model.diagnostics.residual_sum_of_squares,
            "training_rows": model.diagnostics.training_rows,
            "condition_estimate": model.diagnostics.condition_estimate,
        },
    }


def model_from_json_dict(document: dict) -> RegressionModel:
    try:
        spec = FeatureSpec(
            target=ColumnKey.parse(document["spec"]["target"]),
            features=tuple(ColumnKey.parse(n) for n in document["spec"]["features"]),
            include_intercept=bool(document["spec"]["include_intercept"]),
        )
        diagnostics = FitDiagnostics(
            residual_sum_of_squares=float(document["diagnostics"]["residual_sum_of_squares"]),
            training_rows=int(document["diagnostics"]["training_rows"]),
            condition_estimate=float(document["diagnostics"]["condition_estimate"]),
        )
        return RegressionModel(spec, np.array(document["weights"], dtype=float), diagnostics)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed model document: {exc}") from exc
