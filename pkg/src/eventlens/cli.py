"""Operator-facing command surface.

Subcommands: fetch (populate the cache), correlate / fit / project (run
one stage against the cache), run (full scenario to a report bundle), and
report (re-emit a bundle from a saved scenario report).

Exit codes: 0 success, 1 data/model errors, 2 usage errors. Failures are
written to stderr as a single machine-parseable line.

The config file is a JSON document with two sections::

    {"provider": {"cache_dir": "cache", "rate_limit": 5, ...},
     "scenario": {...}}

Relative provider paths are resolved against the config file's directory.
The API key comes from the provider section or EVENTLENS_API_KEY.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from pathlib import Path

from . import report as report_mod
from . import scenario as scenario_mod
from .errors import EventLensError, ProviderError
from .ingest import InstrumentId, ProviderConfig, RawSeries, fetch_daily
from .panel import FIELD_ORDER, align
from .regress import fit_ols, model_to_json_dict, predict
from .scenario import ProjectionMode, ScenarioConfig
from .stats import correlation_matrix, matrix_to_csv_bytes, matrix_to_json_dict

PROG = "eventlens"


def _offline_transport(url: str) -> bytes:
    raise ProviderError("offline mode forbids network access")


def _error_category(exc: BaseException) -> str:
    name = type(exc).__name__
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "-", name).lower()


def _fail(exc: BaseException) -> int:
    message = " ".join(str(exc).split())
    print(f"{PROG}: error: {_error_category(exc)}: {message}", file=sys.stderr)
    return 1


def _parse_formats(raw: str, parser: argparse.ArgumentParser) -> set[str]:
    formats = {part.strip() for part in raw.split(",") if part.strip()}
    unknown = formats - set(report_mod.FORMATS)
    if unknown:
        parser.error(f"unknown formats: {', '.join(sorted(unknown))}")
    return formats


def _load_config(path_str: str, parser: argparse.ArgumentParser) -> tuple[ProviderConfig, ScenarioConfig]:
    path = Path(path_str)
    if not path.is_file():
        parser.error(f"config file not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        provider_section = dict(document.get("provider", {}))
        scenario_config = scenario_mod.config_from_json_dict(document["scenario"])
    except (ValueError, KeyError, TypeError, EventLensError) as exc:
        parser.error(f"unparseable config {path}: {exc}")
    cache_dir = Path(provider_section.pop("cache_dir", "cache"))
    if not cache_dir.is_absolute():
        cache_dir = path.parent / cache_dir
    try:
        provider_config = ProviderConfig(cache_dir=cache_dir, **provider_section)
    except (TypeError, EventLensError) as exc:
        parser.error(f"bad provider section in {path}: {exc}")
    return provider_config, scenario_config


def _load_universe(
    config: ScenarioConfig, provider: ProviderConfig, offline: bool
) -> list[RawSeries]:
    transport = _offline_transport if offline else None
    return [fetch_daily(instrument, provider, transport) for instrument in config.universe]


def _apply_mode(config: ScenarioConfig, mode: str | None) -> ScenarioConfig:
    if mode is None:
        return config
    return dataclasses.replace(config, projection_mode=ProjectionMode(mode))


def cmd_fetch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    provider, config = _load_config(args.config, parser)
    instruments: list[InstrumentId] = list(config.universe)
    if args.symbol:
        wanted = set(args.symbol)
        by_symbol = {i.symbol: i for i in instruments}
        missing = wanted - set(by_symbol)
        if missing:
            parser.error(f"symbols not in universe: {', '.join(sorted(missing))}")
        instruments = [by_symbol[s] for s in args.symbol]
    for instrument in instruments:
        series = fetch_daily(instrument, provider)
        print(f"{instrument.symbol}: {len(series)} bars cached")
    return 0


def cmd_correlate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    provider, config = _load_config(args.config, parser)
    formats = _parse_formats(args.format, parser)
    panel = align(_load_universe(config, provider, args.offline), FIELD_ORDER)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, window in (
        ("corr_before", config.correlation_before),
        ("corr_after", config.correlation_after),
    ):
        matrix = correlation_matrix(panel.slice(window), config.close_keys())
        if "csv" in formats:
            (out_dir / f"{name}.csv").write_bytes(matrix_to_csv_bytes(matrix))
        if "json" in formats:
            payload = json.dumps(matrix_to_json_dict(matrix), indent=2) + "\n"
            (out_dir / f"{name}.json").write_text(payload, encoding="ascii")
        print(f"{name}: {len(matrix.labels)}x{len(matrix.labels)} matrix written")
    return 0


def cmd_fit(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    provider, config = _load_config(args.config, parser)
    panel = align(_load_universe(config, provider, args.offline), FIELD_ORDER)
    train = panel.slice(config.train_window)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec in config.feature_specs:
        model = fit_ols(train, spec)
        payload = json.dumps(model_to_json_dict(model), indent=2) + "\n"
        (out_dir / f"model_{spec.target.symbol}.json").write_text(payload, encoding="ascii")
        rss = model.diagnostics.residual_sum_of_squares
        print(f"{spec.target.symbol}: fit on {model.diagnostics.training_rows} rows, rss={rss:.6g}")
    return 0


def cmd_project(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    provider, config = _load_config(args.config, parser)
    config = _apply_mode(config, args.mode)
    formats = _parse_formats(args.format, parser)
    panel = align(_load_universe(config, provider, args.offline), FIELD_ORDER)
    train = panel.slice(config.train_window)
    realized_slice = panel.slice(config.projection_window)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for spec in config.feature_specs:
        model = fit_ols(train, spec)
        counterfactual = predict(model, scenario_mod.projection_features(panel, config, spec))
        realized = realized_slice.column(spec.target)
        symbol = spec.target.symbol
        if "csv" in formats:
            payload = report_mod.counterfactual_csv_bytes(
                realized_slice.dates, realized, counterfactual
            )
            (out_dir / f"counterfactual_{symbol}.csv").write_bytes(payload)
        if "json" in formats:
            payload = report_mod.counterfactual_json_bytes(
                realized_slice.dates, realized, counterfactual
            )
            (out_dir / f"counterfactual_{symbol}.json").write_bytes(payload)
        print(f"counterfactual_{symbol} written")
    return 0


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    provider, config = _load_config(args.config, parser)
    config = _apply_mode(config, args.mode)
    formats = _parse_formats(args.format, parser)
    report = scenario_mod.run_scenario(config, _load_universe(config, provider, args.offline))
    bundle = report_mod.emit(report, Path(args.out), formats)
    if args.save_report:
        save_path = Path(args.save_report)
        save_path.parent.mkdir(parents=True, exist_ok=True)
        save_path.write_bytes(scenario_mod.report_to_json_bytes(report))
    print(f"bundle written to {bundle.directory} ({len(bundle.manifest['files'])} files)")
    return 0


def cmd_report(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    source = Path(args.from_report)
    if not source.is_file():
        parser.error(f"report file not found: {source}")
    formats = _parse_formats(args.format, parser)
    try:
        document = json.loads(source.read_text(encoding="utf-8"))
    except ValueError as exc:
        parser.error(f"unparseable report {source}: {exc}")
    report = scenario_mod.report_from_json_dict(document)
    bundle = report_mod.emit(report, Path(args.out), formats)
    print(f"bundle written to {bundle.directory} ({len(bundle.manifest['files'])} files)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Quantify a discrete event's impact on financial indexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_common(p: argparse.ArgumentParser, out: bool = True, mode: bool = False) -> None:
        p.add_argument("--config", required=True, help="path to the JSON config document")
        p.add_argument("--offline", action="store_true", help="forbid all network access")
        if out:
            p.add_argument("--out", default="out", help="output directory (default: out)")
            p.add_argument("--format", default="csv,json", help="comma list of csv,json")
        if mode:
            p.add_argument(
                "--mode",
                choices=[m.value for m in ProjectionMode],
                help="override the config's projection mode",
            )

    p_fetch = sub.add_parser("fetch", help="populate the local cache")
    add_common(p_fetch, out=False)
    p_fetch.add_argument("--symbol", action="append", help="restrict to this symbol (repeatable)")
    p_fetch.set_defaults(handler=cmd_fetch)

    p_correlate = sub.add_parser("correlate", help="write before/after correlation matrices")
    add_common(p_correlate)
    p_correlate.set_defaults(handler=cmd_correlate)

    p_fit = sub.add_parser("fit", help="fit per-target models on the training window")
    add_common(p_fit)
    p_fit.set_defaults(handler=cmd_fit)

    p_project = sub.add_parser("project", help="write counterfactual-vs-realized series")
    add_common(p_project, mode=True)
    p_project.set_defaults(handler=cmd_project)

    p_run = sub.add_parser("run", help="full scenario to a report bundle")
    add_common(p_run, mode=True)
    p_run.add_argument("--save-report", help="also save the full scenario report JSON here")
    p_run.set_defaults(handler=cmd_run)

    p_report = sub.add_parser("report", help="re-emit a bundle from a saved scenario report")
    p_report.add_argument("--from", dest="from_report", required=True, help="saved report JSON")
    p_report.add_argument("--out", default="out", help="output directory (default: out)")
    p_report.add_argument("--format", default="csv,json", help="comma list of csv,json")
    p_report.set_defaults(handler=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fetch" and args.offline:
        parser.error("fetch --offline is contradictory: fetching requires network access")
    try:
        return args.handler(args, parser)
    except (EventLensError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    raise SystemExit(main())
