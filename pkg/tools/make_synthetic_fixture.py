#!/usr/bin/env python3
"""Generate the committed synthetic fixture: 6 symbols, 700 trading days.

Three factor symbols (FAC1..FAC3) follow seeded mean-reverting walks.
Three target symbols (TGT1..TGT3) have closes built as an exact linear
combination of their own open/high/low and the factor closes, plus
optional zero-mean gaussian noise:

    close = w0 + wo*open + wh*high + wl*low + sum_j wf_j * FACj.close (+ eps)

The open/high/low loadings are convex, which pins the noise-free close
strictly inside the bar's low/high band, so every generated bar satisfies
the OHLC invariants by construction (asserted below).

Two variants share the same bars except for target closes:
  clean/  eps = 0        (exact weight recovery)
  noisy/  eps ~ N(0, sigma), sigma recorded in truth.json

Outputs under tests/fixtures/synthetic/: per-symbol CSVs, three runnable
config documents, and truth.json with the generating weights.

Deterministic: fixed RNG seed, plain-text output. Rerunning reproduces
the committed files byte for byte.
"""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np

SEED = 946_301
N_DAYS = 700
SIGMA = 0.05
OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "synthetic"

FACTORS = {"FAC1": 100.0, "FAC2": 80.0, "FAC3": 120.0}
FACTOR_KINDS = {"FAC1": "commodity", "FAC2": "currency_index", "FAC3": "equity"}

# symbol -> (intercept, (w_open, w_high, w_low), {factor: weight})
TARGET_WEIGHTS = {
    "TGT1": (-0.05, (0.20, 0.40, 0.40), {"FAC1": 0.0015, "FAC2": -0.0010, "FAC3": 0.0008}),
    "TGT2": (0.10, (0.25, 0.35, 0.40), {"FAC1": -0.0012, "FAC2": 0.0009, "FAC3": 0.0011}),
    "TGT3": (-0.12, (0.30, 0.30, 0.40), {"FAC1": 0.0007, "FAC2": 0.0013, "FAC3": -0.0009}),
}
TARGET_LEVELS = {"TGT1": 100.0, "TGT2": 140.0, "TGT3": 70.0}

# row offsets into the 700 trading dates
TRAIN = (0, 449)
TEST = (450, 599)
SOURCE = (600, 639)
PROJECTION = (640, 699)


def trading_dates(n: int, start: dt.date = dt.date(2019, 1, 1)) -> list[dt.date]:
    dates = []
    day = start
    while len(dates) < n:
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)
    return dates


def mean_reverting_walk(rng, n, level, pull, scale) -> np.ndarray:
    values = np.empty(n)
    current = level
    for i in range(n):
        current = current + pull * (level - current) + rng.normal(0.0, scale)
        values[i] = current
    return values


def factor_bars(rng, closes: np.ndarray) -> dict[str, np.ndarray]:
    opens = closes + rng.normal(0.0, 0.3, closes.shape[0])
    span = rng.uniform(0.2, 0.6, closes.shape[0])
    highs = np.maximum(opens, closes) + span
    lows = np.minimum(opens, closes) - span
    return {"open": opens, "high": highs, "low": lows, "close": closes}


def write_series_csv(path: Path, dates, bars: dict[str, np.ndarray]) -> None:
    lines = ["date,open,high,low,close"]
    for i, date in enumerate(dates):
        o, h, l, c = (float(bars[f][i]) for f in ("open", "high", "low", "close"))
        assert 0.0 < l <= min(o, c) and max(o, c) <= h, f"bad bar {date} in {path.name}"
        lines.append(f"{date.isoformat()},{o!r},{h!r},{l!r},{c!r}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def window(dates, bounds) -> dict[str, str]:
    return {"start": dates[bounds[0]].isoformat(), "end": dates[bounds[1]].isoformat()}


def main() -> None:
    rng = np.random.default_rng(SEED)
    dates = trading_dates(N_DAYS)

    factor_data = {}
    for symbol, level in FACTORS.items():
        closes = mean_reverting_walk(rng, N_DAYS, level, 0.02, 0.7)
        factor_data[symbol] = factor_bars(rng, closes)

    target_data_clean = {}
    target_data_noisy = {}
    noise = {symbol: rng.normal(0.0, SIGMA, N_DAYS) for symbol in TARGET_WEIGHTS}
    for symbol, (w0, (wo, wh, wl), factor_weights) in TARGET_WEIGHTS.items():
        opens = mean_reverting_walk(rng, N_DAYS, TARGET_LEVELS[symbol], 0.03, 0.9)
        highs = opens + rng.uniform(1.0, 2.0, N_DAYS)
        lows = opens - rng.uniform(1.0, 2.0, N_DAYS)
        base = w0 + wo * opens + wh * highs + wl * lows
        for factor, weight in factor_weights.items():
            base = base + weight * factor_data[factor]["close"]
        shared = {"open": opens, "high": highs, "low": lows}
        target_data_clean[symbol] = {**shared, "close": base}
        target_data_noisy[symbol] = {**shared, "close": base + noise[symbol]}

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for variant, target_data in (("clean", target_data_clean), ("noisy", target_data_noisy)):
        variant_dir = OUT_DIR / variant
        variant_dir.mkdir(exist_ok=True)
        for symbol, bars in {**factor_data, **target_data}.items():
            write_series_csv(variant_dir / f"{symbol}.csv", dates, bars)

    universe = [{"symbol": s, "kind": FACTOR_KINDS[s]} for s in FACTORS] + [
        {"symbol": s, "kind": "equity"} for s in TARGET_WEIGHTS
    ]
    feature_specs = [
        {
            "target": f"{symbol}.close",
            "features": [f"{symbol}.open", f"{symbol}.high", f"{symbol}.low"]
            + [f"{factor}.close" for factor in FACTORS],
            "include_intercept": True,
        }
        for symbol in TARGET_WEIGHTS
    ]
    scenario_common = {
        "universe": universe,
        "feature_specs": feature_specs,
        "train_window": window(dates, TRAIN),
        "test_window": window(dates, TEST),
        "correlation_before": window(dates, SOURCE),
        "correlation_after": window(dates, PROJECTION),
        "source_window": window(dates, SOURCE),
        "projection_window": window(dates, PROJECTION),
    }
    configs = {
        "scenario_clean.json": ("clean", "oracle_features"),
        "scenario_noisy.json": ("noisy", "oracle_features"),
        "scenario_noisy_dateshift.json": ("noisy", "date_shifted"),
    }
    for name, (variant, mode) in configs.items():
        document = {
            "provider": {"cache_dir": variant},
            "scenario": {**scenario_common, "projection_mode": mode},
        }
        (OUT_DIR / name).write_text(json.dumps(document, indent=2) + "\n", encoding="ascii")

    truth = {
        "seed": SEED,
        "sigma": SIGMA,
        "targets": {
            symbol: {
                "intercept": w0,
                "weights": dict(
                    zip(
                        [f"{symbol}.open", f"{symbol}.high", f"{symbol}.low"]
                        + [f"{factor}.close" for factor in FACTORS],
                        [wo, wh, wl] + [factor_weights[f] for f in FACTORS],
                    )
                ),
            }
            for symbol, (w0, (wo, wh, wl), factor_weights) in TARGET_WEIGHTS.items()
        },
    }
    (OUT_DIR / "truth.json").write_text(json.dumps(truth, indent=2) + "\n", encoding="ascii")
    print(f"fixture written under {OUT_DIR}")


if __name__ == "__main__":
    main()
