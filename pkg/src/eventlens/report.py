"""Serialize scenario outputs into plot-ready tables with a digest manifest.

No figures are rendered; the bundle holds the data behind them. Every
file is written atomically and the manifest goes last, so a bundle with a
manifest is complete by construction. Emission is deterministic:
re-emitting the same report yields byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import ConfigError
from .scenario import ScenarioReport
from .stats import matrix_to_csv_bytes, matrix_to_json_dict

MANIFEST_NAME = "manifest.json"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ReportBundle:
    directory: Path
    manifest: dict


def _metrics_rows(report: ScenarioReport) -> list[dict]:
    rows = []
    for symbol, result in report.targets.items():
        for phase, metrics in (
            ("test", result.test_metrics),
            ("divergence", result.divergence_metrics),
        ):
            rows.append({"symbol": symbol, "phase": phase, **metrics.to_json_dict()})
    return rows


def _metrics_csv(report: ScenarioReport) -> bytes:
    lines = ["symbol,phase,mse,rmse,mae,mape,n"]
    for row in _metrics_rows(report):
        lines.append(
            f"{row['symbol']},{row['phase']},{row['mse']!r},{row['rmse']!r},"
            f"{row['mae']!r},{row['mape']!r},{row['n']}"
        )
    return ("\n".join(lines) + "\n").encode("ascii")


def counterfactual_csv_bytes(dates, realized, counterfactual) -> bytes:
    lines = ["date,realized,counterfactual"]
    for date, r, c in zip(dates, realized, counterfactual):
        lines.append(f"{date.isoformat()},{float(r)!r},{float(c)!r}")
    return ("\n".join(lines) + "\n").encode("ascii")


def counterfactual_json_bytes(dates, realized, counterfactual) -> bytes:
    rows = [
        {"date": date.isoformat(), "realized": float(r), "counterfactual": float(c)}
        for date, r, c in zip(dates, realized, counterfactual)
    ]
    return (json.dumps(rows, indent=2) + "\n").encode("ascii")


def _json_bytes(document) -> bytes:
    return (json.dumps(document, indent=2) + "\n").encode("ascii")


def render_files(report: ScenarioReport, formats: Iterable[str]) -> dict[str, bytes]:
    """File name -> content for the requested formats, manifest excluded."""
    wanted = sorted(set(formats))
    unknown = [fmt for fmt in wanted if fmt not in FORMATS]
    if unknown:
        raise ConfigError(f"unknown report formats: {', '.join(unknown)}")

    files: dict[str, bytes] = {}
    for fmt in wanted:
        if fmt == "csv":
            files["metrics.csv"] = _metrics_csv(report)
            files["corr_before.csv"] = matrix_to_csv_bytes(report.correlation_before)
            files["corr_after.csv"] = matrix_to_csv_bytes(report.correlation_after)
            for symbol, result in report.targets.items():
                files[f"counterfactual_{symbol}.csv"] = counterfactual_csv_bytes(
                    result.projection_dates, result.realized, result.counterfactual
                )
        else:
            files["metrics.json"] = _json_bytes(_metrics_rows(report))
            files["corr_before.json"] = _json_bytes(matrix_to_json_dict(report.correlation_before))
            files["corr_after.json"] = _json_bytes(matrix_to_json_dict(report.correlation_after))
            for symbol, result in report.targets.items():
                files[f"counterfactual_{symbol}.json"] = counterfactual_json_bytes(
                    result.projection_dates, result.realized, result.counterfactual
                )
    return files


def _write_atomic(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def emit(
    report: ScenarioReport, out_dir: Path, formats: Iterable[str] = FORMATS
) -> ReportBundle:
    """Write the bundle into out_dir and finish with the manifest.

    The manifest records every emitted file with its size and SHA-256
    digest plus the scenario's config digest. An empty format set yields a
    manifest-only bundle.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    files = render_files(report, formats)
    entries = []
    for name in sorted(files):
        payload = files[name]
        _write_atomic(out_dir / name, payload)
        entries.append(
            {
                "file": name,
                "bytes": len(payload),
                "digest": hashlib.sha256(payload).hexdigest(),
            }
        )

    manifest = {"config_digest": report.provenance.get("config_digest"), "files": entries}
    _write_atomic(out_dir / MANIFEST_NAME, _json_bytes(manifest))
    return ReportBundle(directory=out_dir, manifest=manifest)
