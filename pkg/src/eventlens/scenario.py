"""The end-to-end event-impact protocol.

A scenario fits one linear model per target on a pre-event training
window, scores it on a held-out test window, then projects a
counterfactual "no event" price path over the projection window and
measures how far realized prices diverged from it. Two correlation
matrices (before/after windows) capture the shift in cross-market
structure around the event.

Counterfactual feature handling is the one place the protocol is genuinely
ambiguous, so both readings are explicit modes:

- ``date_shifted``: feed the pre-event source window's feature rows,
  re-dated onto the projection window's trading dates (cycling the source
  rows when the projection window is longer). No post-event information
  enters the model.
- ``oracle_features``: feed the realized projection-window features. The
  projection then isolates how far the fitted relationship itself drifted.

Given identical config and input series, a scenario run is fully
deterministic, and its report serializes to byte-identical JSON.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import ConfigError, EventLensError, PanelError
from .ingest import InstrumentId, InstrumentKind, RawSeries, series_to_csv_bytes
from .metrics import MetricsReport, score
from .panel import FIELD_ORDER, AlignedPanel, BarField, ColumnKey, DateWindow, align
from .regress import (
    FeatureSpec,
    RegressionModel,
    fit_ols,
    model_from_json_dict,
    model_to_json_dict,
    predict,
)
from .stats import CorrelationMatrix, correlation_matrix, matrix_from_json_dict, matrix_to_json_dict


class ProjectionMode(str, Enum):
    DATE_SHIFTED = "date_shifted"
    ORACLE_FEATURES = "oracle_features"


@dataclass(frozen=True)
class ScenarioConfig:
    """The full dated experimental protocol.

    ``source_window`` supplies counterfactual feature rows in date_shifted
    mode; ``projection_window`` is where the counterfactual is scored
    against realized prices.
    """

    universe: tuple[InstrumentId, ...]
    feature_specs: tuple[FeatureSpec, ...]
    train_window: DateWindow
    test_window: DateWindow
    correlation_before: DateWindow
    correlation_after: DateWindow
    source_window: DateWindow
    projection_window: DateWindow
    projection_mode: ProjectionMode = ProjectionMode.DATE_SHIFTED

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "feature_specs", tuple(self.feature_specs))
        if not self.universe:
            raise ConfigError("universe must not be empty")
        symbols = [instrument.symbol for instrument in self.universe]
        if len(set(symbols)) != len(symbols):
            raise ConfigError("universe contains duplicate symbols")
        if not self.feature_specs:
            raise ConfigError("at least one feature spec is required")
        # Identical train/test windows are allowed as an exact-fit diagnostic;
        # the test window must simply not begin before training data does.
        if self.test_window.start < self.train_window.start:
            raise ConfigError(
                f"test window {self.test_window} starts before training window {self.train_window}"
            )
        for name, window in self.named_windows().items():
            if window.start >= window.end:
                raise ConfigError(f"{name} {window} is degenerate")
        known = set(symbols)
        for spec in self.feature_specs:
            for key in (spec.target, *spec.features):
                if key.symbol not in known:
                    raise ConfigError(
                        f"column {key.name} not resolvable from universe {sorted(known)}"
                    )

    def named_windows(self) -> dict[str, DateWindow]:
        return {
            "train_window": self.train_window,
            "test_window": self.test_window,
            "correlation_before": self.correlation_before,
            "correlation_after": self.correlation_after,
            "source_window": self.source_window,
            "projection_window": self.projection_window,
        }

    def close_keys(self) -> tuple[ColumnKey, ...]:
        return tuple(ColumnKey(i.symbol, BarField.CLOSE) for i in self.universe)


@dataclass(frozen=True)
class TargetResult:
    """Fit, test score, and counterfactual-vs-realized paths for one target."""

    model: RegressionModel
    test_metrics: MetricsReport
    projection_dates: tuple[dt.date, ...]
    realized: np.ndarray
    counterfactual: np.ndarray
    divergence_metrics: MetricsReport

    def __post_init__(self) -> None:
        realized = np.array(self.realized, dtype=float)
        counterfactual = np.array(self.counterfactual, dtype=float)
        n = len(self.projection_dates)
        if realized.shape != (n,) or counterfactual.shape != (n,):
            raise ConfigError("realized and counterfactual series must share the projection dates")
        realized.flags.writeable = False
        counterfactual.flags.writeable = False
        object.__setattr__(self, "realized", realized)
        object.__setattr__(self, "counterfactual", counterfactual)
        object.__setattr__(self, "projection_dates", tuple(self.projection_dates))


@dataclass(frozen=True)
class ScenarioReport:
    """Everything a scenario run produced, keyed by target symbol."""

    targets: dict[str, TargetResult]
    correlation_before: CorrelationMatrix
    correlation_after: CorrelationMatrix
    provenance: dict


# --- config (de)serialization -------------------------------------------------

def _window_to_json(window: DateWindow) -> dict:
    return {"start": window.start.isoformat(), "end": window.end.isoformat()}


def _window_from_json(document: dict, name: str) -> DateWindow:
    try:
        return DateWindow(
            dt.date.fromisoformat(document["start"]), dt.date.fromisoformat(document["end"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed {name}: {exc}") from exc


def config_to_json_dict(config: ScenarioConfig) -> dict:
    document: dict = {
        "universe": [{"symbol": i.symbol, "kind": i.kind.value} for i in config.universe],
        "feature_specs": [
            {
                "target": spec.target.name,
                "features": [key.name for key in spec.features],
                "include_intercept": spec.include_intercept,
            }
            for spec in config.feature_specs
        ],
    }
    for name, window in config.named_windows().items():
        document[name] = _window_to_json(window)
    document["projection_mode"] = config.projection_mode.value
    return document


def config_from_json_dict(document: dict) -> ScenarioConfig:
    try:
        universe = tuple(
            InstrumentId(entry["symbol"], InstrumentKind(entry["kind"]))
            for entry in document["universe"]
        )
        feature_specs = tuple(
            FeatureSpec(
                target=ColumnKey.parse(entry["target"]),
                features=tuple(ColumnKey.parse(name) for name in entry["features"]),
                include_intercept=bool(entry.get("include_intercept", True)),
            )
            for entry in document["feature_specs"]
        )
        mode = ProjectionMode(document.get("projection_mode", ProjectionMode.DATE_SHIFTED.value))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario config: {exc}") from exc
    return ScenarioConfig(
        universe=universe,
        feature_specs=feature_specs,
        train_window=_window_from_json(document["train_window"], "train_window"),
        test_window=_window_from_json(document["test_window"], "test_window"),
        correlation_before=_window_from_json(document["correlation_before"], "correlation_before"),
        correlation_after=_window_from_json(document["correlation_after"], "correlation_after"),
        source_window=_window_from_json(document["source_window"], "source_window"),
        projection_window=_window_from_json(document["projection_window"], "projection_window"),
        projection_mode=mode,
    )


def config_digest(config: ScenarioConfig) -> str:
    """SHA-256 of the canonicalized config document."""
    canonical = json.dumps(config_to_json_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def series_digest(series: RawSeries) -> str:
    """SHA-256 of the series' canonical CSV bytes."""
    return hashlib.sha256(series_to_csv_bytes(series)).hexdigest()


# --- execution -----------------------------------------------------------------

def projection_features(
    panel: AlignedPanel, config: ScenarioConfig, spec: FeatureSpec
) -> AlignedPanel:
    """Feature rows for the counterfactual projection, per the config's mode.

    oracle_features returns the projection-window slice verbatim.
    date_shifted re-dates the source-window rows onto the projection
    window's trading dates, cycling the source rows when the projection
    window is longer.
    """
    for key in spec.features:
        panel.column(key)
    projection = panel.slice(config.projection_window)
    if config.projection_mode is ProjectionMode.ORACLE_FEATURES:
        return projection
    source = panel.slice(config.source_window)
    indices = np.arange(projection.n_rows) % source.n_rows
    return AlignedPanel(
        projection.dates, {key: source.column(key)[indices] for key in source.keys}
    )


def projection_cycles(config: ScenarioConfig, panel: AlignedPanel) -> int:
    """Number of passes over the source rows needed to cover the projection
    window (1 means no cycling); always 1 in oracle_features mode."""
    if config.projection_mode is ProjectionMode.ORACLE_FEATURES:
        return 1
    n_source = panel.slice(config.source_window).n_rows
    n_projection = panel.slice(config.projection_window).n_rows
    return -(-n_projection // n_source)


def run_scenario(config: ScenarioConfig, data: Iterable[RawSeries]) -> ScenarioReport:
    """Execute the full protocol and assemble a deterministic report.

    Steps: align the universe, compute both correlation matrices over the
    close columns, then per target fit on the training slice, score on the
    test slice, project the counterfactual path, and measure divergence
    from realized closes over the projection window.
    """
    by_symbol: dict[str, RawSeries] = {}
    for series in data:
        symbol = series.instrument.symbol
        if symbol in by_symbol:
            raise ConfigError(f"duplicate input series for {symbol}")
        by_symbol[symbol] = series
    missing = [i.symbol for i in config.universe if i.symbol not in by_symbol]
    if missing:
        raise ConfigError(f"no input series for universe symbols: {', '.join(missing)}")

    ordered = [by_symbol[i.symbol] for i in config.universe]
    data_digests = {series.instrument.symbol: series_digest(series) for series in ordered}
    panel = align(ordered, FIELD_ORDER)

    slices: dict[str, AlignedPanel] = {}
    for name, window in config.named_windows().items():
        try:
            slices[name] = panel.slice(window)
        except PanelError as exc:
            raise ConfigError(f"{name} not covered by aligned data: {exc}") from exc

    close_keys = config.close_keys()
    correlation_before = correlation_matrix(slices["correlation_before"], close_keys)
    correlation_after = correlation_matrix(slices["correlation_after"], close_keys)
    cycles = projection_cycles(config, panel)

    targets: dict[str, TargetResult] = {}
    for spec in config.feature_specs:
        symbol = spec.target.symbol
        try:
            model = fit_ols(slices["train_window"], spec)
            test_metrics = score(
                slices["test_window"].column(spec.target), predict(model, slices["test_window"])
            )
            counterfactual = predict(model, projection_features(panel, config, spec))
            realized = slices["projection_window"].column(spec.target)
            divergence_metrics = score(realized, counterfactual)
        except EventLensError as exc:
            raise type(exc)(f"target {symbol}: {exc}") from exc
        targets[symbol] = TargetResult(
            model=model,
            test_metrics=test_metrics,
            projection_dates=slices["projection_window"].dates,
            realized=realized,
            counterfactual=counterfactual,
            divergence_metrics=divergence_metrics,
        )

    provenance = {
        "config_digest": config_digest(config),
        "data_digests": data_digests,
        "projection_mode": config.projection_mode.value,
        "projection_cycles": cycles,
    }
    return ScenarioReport(
        targets=targets,
        correlation_before=correlation_before,
        correlation_after=correlation_after,
        provenance=provenance,
    )


# --- report (de)serialization ---------------------------------------------------

def report_to_json_dict(report: ScenarioReport) -> dict:
    return {
        "provenance": report.provenance,
        "correlation_before": matrix_to_json_dict(report.correlation_before),
        "correlation_after": matrix_to_json_dict(report.correlation_after),
        "targets": {
            symbol: {
                "model": model_to_json_dict(result.model),
                "test_metrics": result.test_metrics.to_json_dict(),
                "projection_dates": [d.isoformat() for d in result.projection_dates],
                "realized": [float(v) for v in result.realized],
                "counterfactual": [float(v) for v in result.counterfactual],
                "divergence_metrics": result.divergence_metrics.to_json_dict(),
            }
            for symbol, result in report.targets.items()
        },
    }


def report_to_json_bytes(report: ScenarioReport) -> bytes:
    return (json.dumps(report_to_json_dict(report), indent=2) + "\n").encode("ascii")


def report_from_json_dict(document: dict) -> ScenarioReport:
    try:
        targets = {
            symbol: TargetResult(
                model=model_from_json_dict(entry["model"]),
                test_metrics=MetricsReport.from_json_dict(entry["test_metrics"]),
                projection_dates=tuple(
                    dt.date.fromisoformat(d) for d in entry["projection_dates"]
                ),
                realized=np.array(entry["realized"], dtype=float),
                counterfactual=np.array(entry["counterfactual"], dtype=float),
                divergence_metrics=MetricsReport.from_json_dict(entry["divergence_metrics"]),
            )
            for symbol, entry in document["targets"].items()
        }
        return ScenarioReport(
            targets=targets,
            correlation_before=matrix_from_json_dict(document["correlation_before"]),
            correlation_after=matrix_from_json_dict(document["correlation_after"]),
            provenance=dict(document["provenance"]),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario report document: {exc}") from exc
