#!/usr/bin/env python3
"""Walk through paper.json, the committed real-data protocol.

The config pins everything about the experiment: six instruments, one
feature row per prediction target, the 2019-2021 training window, the
late-2021 test window, the January 2022 source window, and the February
2022 projection window where counterfactual and realized prices are
compared.

Without network access this script just explains the protocol. With an
API key in EVENTLENS_API_KEY it fetches the data (cached under cache/
next to the config) and executes the scenario end to end, which is
exactly what the CLI does:

    eventlens run --config paper.json --out out/paper

Run from the repository root:

    python demos/paper_protocol.py
"""

import os
from pathlib import Path
import json

from eventlens import (
    ProviderConfig,
    ProviderError,
    config_from_json_dict,
    fetch_daily,
    run_scenario,
)

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    document = json.loads((ROOT / "paper.json").read_text())
    config = config_from_json_dict(document["scenario"])

    print("universe:")
    for instrument in config.universe:
        print(f"  {instrument.symbol:8} ({instrument.kind.value})")
    print("\nfeature rows (target <- features):")
    for spec in config.feature_specs:
        print(f"  {spec.target.name:14} <- {', '.join(k.name for k in spec.features)}")
    print("\nwindows:")
    for name, window in config.named_windows().items():
        print(f"  {name:20} {window}")
    print(f"\nprojection mode: {config.projection_mode.value}")

    provider = ProviderConfig(cache_dir=ROOT / "cache")
    cached = [
        instrument
        for instrument in config.universe
        if (provider.cache_dir / f"{instrument.symbol}.csv").exists()
    ]
    if len(cached) < len(config.universe) and not os.environ.get("EVENTLENS_API_KEY"):
        print(
            "\nno cached data and no EVENTLENS_API_KEY set; stopping after the tour.\n"
            "Set the key (and pick provider symbols for the dollar index and the\n"
            "commodities that your provider actually serves), then rerun, or use:\n"
            "    eventlens fetch --config paper.json"
        )
        return

    print("\nfetching (cache-first)...")
    try:
        data = [fetch_daily(instrument, provider) for instrument in config.universe]
    except ProviderError as exc:
        print(f"fetch failed: {exc}")
        return
    report = run_scenario(config, data)
    for symbol, result in report.targets.items():
        d = result.divergence_metrics
        print(
            f"  {symbol:8} divergence over {config.projection_window}: "
            f"rmse={d.rmse:.4f} mape={d.mape:.3f}%"
        )


if __name__ == "__main__":
    main()
