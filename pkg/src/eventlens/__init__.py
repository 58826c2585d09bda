"""Event-impact analysis for financial indexes.

Quantifies the effect of a discrete event on a set of market indexes two
ways: the shift in windowed Pearson correlation structure around the
event, and the divergence of realized prices from a counterfactual path
projected by a linear model trained on pre-event data.
"""

from .errors import (
    BarInvariantError,
    CacheError,
    ConfigError,
    DataFormatError,
    EventLensError,
    FitError,
    MetricError,
    PanelError,
    ProviderError,
    StatsError,
)
from .ingest import (
    DailyBar,
    InstrumentId,
    InstrumentKind,
    ProviderConfig,
    RateLimiter,
    RawSeries,
    fetch_daily,
    fetch_universe,
    load_csv,
    parse_provider_payload,
    series_to_csv_bytes,
    write_csv,
)
from .metrics import MetricsReport, mae, mape, mse, rmse, score
from .panel import AlignedPanel, BarField, ColumnKey, DateWindow, align
from .regress import (
    FeatureSpec,
    FitDiagnostics,
    RegressionModel,
    fit_ols,
    predict,
    standardized_weights,
)
from .report import ReportBundle, emit
from .scenario import (
    ProjectionMode,
    ScenarioConfig,
    ScenarioReport,
    TargetResult,
    config_digest,
    config_from_json_dict,
    config_to_json_dict,
    projection_features,
    report_from_json_dict,
    report_to_json_bytes,
    report_to_json_dict,
    run_scenario,
)
from .stats import CorrelationMatrix, correlation_matrix, covariance, pearson

__version__ = "0.1.0"

__all__ = [
    "AlignedPanel",
    "BarField",
    "BarInvariantError",
    "CacheError",
    "ColumnKey",
    "ConfigError",
    "CorrelationMatrix",
    "DailyBar",
    "DataFormatError",
    "DateWindow",
    "EventLensError",
    "FeatureSpec",
    "FitDiagnostics",
    "FitError",
    "InstrumentId",
    "InstrumentKind",
    "MetricError",
    "MetricsReport",
    "PanelError",
    "ProjectionMode",
    "ProviderConfig",
    "ProviderError",
    "RateLimiter",
    "RawSeries",
    "RegressionModel",
    "ReportBundle",
    "ScenarioConfig",
    "ScenarioReport",
    "StatsError",
    "TargetResult",
    "align",
    "config_digest",
    "config_from_json_dict",
    "config_to_json_dict",
    "correlation_matrix",
    "covariance",
    "emit",
    "fetch_daily",
    "fetch_universe",
    "fit_ols",
    "load_csv",
    "mae",
    "mape",
    "mse",
    "parse_provider_payload",
    "pearson",
    "predict",
    "projection_features",
    "report_from_json_dict",
    "report_to_json_bytes",
    "report_to_json_dict",
    "rmse",
    "run_scenario",
    "score",
    "series_to_csv_bytes",
    "standardized_weights",
    "write_csv",
]
