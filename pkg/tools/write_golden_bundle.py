#!/usr/bin/env python3
"""Regenerate the committed golden bundle from the synthetic fixture.

Runs the noisy oracle-features scenario through the library and emits the
bundle plus the serialized scenario report under tests/fixtures/golden/.
The numbers inside are cross-checked against tools/derive_golden.py
output by the test suite; this script exists so the byte-level goldens
can be refreshed deliberately (and only deliberately) after a reviewed
change to serialization.
"""

from __future__ import annotations

import json
from pathlib import Path

from eventlens import config_from_json_dict, load_csv, report_to_json_bytes, run_scenario
from eventlens.report import emit

ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = ROOT / "tests" / "fixtures" / "synthetic"
GOLDEN_DIR = ROOT / "tests" / "fixtures" / "golden"


def main() -> None:
    document = json.loads((FIXTURE_DIR / "scenario_noisy.json").read_text())
    config = config_from_json_dict(document["scenario"])
    cache = FIXTURE_DIR / document["provider"]["cache_dir"]
    data = [load_csv(cache / f"{i.symbol}.csv", i) for i in config.universe]
    report = run_scenario(config, data)

    bundle = emit(report, GOLDEN_DIR / "bundle", formats=("csv", "json"))
    (GOLDEN_DIR / "scenario_report.json").write_bytes(report_to_json_bytes(report))
    print(f"golden bundle written to {bundle.directory} ({len(bundle.manifest['files'])} files)")


if __name__ == "__main__":
    main()
