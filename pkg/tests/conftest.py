from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np
import pytest

from eventlens import DailyBar, InstrumentId, InstrumentKind, RawSeries, load_csv
from eventlens.scenario import ScenarioConfig, config_from_json_dict

FIXTURE_DIR = Path(__file__).parent / "fixtures"
SYNTHETIC_DIR = FIXTURE_DIR / "synthetic"
GOLDEN_DIR = FIXTURE_DIR / "golden"


def make_instrument(symbol: str, kind: InstrumentKind = InstrumentKind.EQUITY) -> InstrumentId:
    return InstrumentId(symbol, kind)


def make_bar(date: dt.date, close: float, spread: float = 1.0) -> DailyBar:
    return DailyBar(date=date, open=close, high=close + spread, low=max(close - spread, 1e-6), close=close)


def make_series(symbol: str, start: dt.date, closes) -> RawSeries:
    bars = tuple(
        make_bar(start + dt.timedelta(days=i), float(c)) for i, c in enumerate(closes)
    )
    return RawSeries(make_instrument(symbol), bars)


def random_series(symbol: str, n: int, rng: np.random.Generator, level: float = 100.0) -> RawSeries:
    closes = level + np.cumsum(rng.normal(0.0, 0.5, n))
    closes = np.maximum(closes, 1.0)
    start = dt.date(2020, 1, 1)
    return make_series(symbol, start, closes)


def load_fixture_config(name: str) -> tuple[dict, ScenarioConfig]:
    document = json.loads((SYNTHETIC_DIR / name).read_text())
    return document, config_from_json_dict(document["scenario"])


def load_fixture_data(variant: str, config: ScenarioConfig) -> list[RawSeries]:
    return [
        load_csv(SYNTHETIC_DIR / variant / f"{instrument.symbol}.csv", instrument)
        for instrument in config.universe
    ]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20220224)


@pytest.fixture(scope="session")
def truth() -> dict:
    return json.loads((SYNTHETIC_DIR / "truth.json").read_text())
