#!/usr/bin/env python3
"""How correlation structure shifts between two windows.

Loads the bundled synthetic fixture, computes Pearson correlation
matrices over the "before" and "after" windows from its scenario config,
and prints the matrices plus the entries that moved the most. With real
event data the same three calls quantify how a shock rewired the
relationships between markets.

Run from the repository root:

    python demos/correlation_shift.py
"""

from pathlib import Path
import json

import numpy as np

from eventlens import align, config_from_json_dict, correlation_matrix, load_csv

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "synthetic"


def show(title, matrix):
    print(f"\n{title}")
    names = [label.name for label in matrix.labels]
    width = max(len(n) for n in names)
    print(" " * (width + 2) + "  ".join(f"{n:>{width}}" for n in names))
    for name, row in zip(names, matrix.values):
        cells = "  ".join(f"{value:>{width}.4f}" for value in row)
        print(f"{name:>{width}}  {cells}")


def main() -> None:
    document = json.loads((FIXTURE / "scenario_noisy.json").read_text())
    config = config_from_json_dict(document["scenario"])
    data = [
        load_csv(FIXTURE / "noisy" / f"{instrument.symbol}.csv", instrument)
        for instrument in config.universe
    ]

    panel = align(data)
    print(f"aligned panel: {panel.n_rows} trading days x {len(panel.keys)} columns")

    keys = config.close_keys()
    before = correlation_matrix(panel.slice(config.correlation_before), keys)
    after = correlation_matrix(panel.slice(config.correlation_after), keys)

    show(f"correlation over {config.correlation_before}", before)
    show(f"correlation over {config.correlation_after}", after)

    shift = after.values - before.values
    print("\nlargest shifts (after - before):")
    order = np.argsort(np.abs(shift), axis=None)[::-1]
    seen = set()
    for flat in order:
        i, j = divmod(int(flat), len(keys))
        if i >= j or (j, i) in seen:
            continue
        seen.add((i, j))
        print(
            f"  {keys[i].name} vs {keys[j].name}: "
            f"{before.values[i, j]:+.4f} -> {after.values[i, j]:+.4f} "
            f"(shift {shift[i, j]:+.4f})"
        )
        if len(seen) == 5:
            break


if __name__ == "__main__":
    main()
