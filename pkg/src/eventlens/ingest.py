"""Daily OHLC acquisition from a quote provider or local CSV files.

The provider speaks a JSON daily-series dialect: a metadata object plus a
map of "YYYY-MM-DD" keys to per-day objects whose open/high/low/close
values are quoted as decimal strings (key names may carry numeric prefixes
such as "1. open"). Fetched series are cached one CSV file per symbol, in
the same layout the test fixtures use, so a warm cache directory doubles
as an offline dataset and every downstream step is reproducible without
network access.

Parse failures are fatal for the whole series rather than row-skipping:
a silently dropped day would corrupt date alignment downstream.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
import re
import threading
import time
import urllib.parse
import urllib.request
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

from .errors import (
    BarInvariantError,
    CacheError,
    ConfigError,
    DataFormatError,
    EventLensError,
    ProviderError,
)

API_KEY_ENV = "EVENTLENS_API_KEY"
DEFAULT_BASE_URL = "https://www.alphavantage.co/query"
CSV_HEADER = "date,open,high,low,close"

Transport = Callable[[str], bytes]


class InstrumentKind(str, Enum):
    CURRENCY_INDEX = "currency_index"
    EQUITY = "equity"
    COMMODITY = "commodity"
    FX_PAIR = "fx_pair"


@dataclass(frozen=True)
class InstrumentId:
    """A quoted instrument: unique symbol plus its asset kind."""

    symbol: str
    kind: InstrumentKind

    def __post_init__(self) -> None:
        if not self.symbol:
            raise ConfigError("instrument symbol must be non-empty")
        if "." in self.symbol or "," in self.symbol:
            raise ConfigError(f"instrument symbol {self.symbol!r} may not contain '.' or ','")


@dataclass(frozen=True)
class DailyBar:
    """One trading day's open/high/low/close quote.

    All four quotes must be finite and positive, with
    low <= open <= high and low <= close <= high.
    """

    date: dt.date
    open: float
    high: float
    low: float
    close: float

    def __post_init__(self) -> None:
        values = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(v) for v in values):
            raise BarInvariantError(f"non-finite quote on {self.date.isoformat()}")
        if not all(v > 0.0 for v in values):
            raise BarInvariantError(f"non-positive quote on {self.date.isoformat()}")
        if not (self.low <= min(self.open, self.close) and max(self.open, self.close) <= self.high):
            raise BarInvariantError(
                f"OHLC ordering violated on {self.date.isoformat()}: "
                f"open={self.open} high={self.high} low={self.low} close={self.close}"
            )


@dataclass(frozen=True)
class RawSeries:
    """An instrument's daily bars, strictly ascending by date.

    ``synthetic_ohlc`` flags series whose source quoted only a close, with
    open=high=low=close synthesized. The CSV wire format cannot carry the
    flag, so it is provenance metadata excluded from equality.
    """

    instrument: InstrumentId
    bars: tuple[DailyBar, ...]
    synthetic_ohlc: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bars", tuple(self.bars))
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date <= prev.date:
                raise DataFormatError(
                    f"series {self.instrument.symbol}: dates not strictly increasing "
                    f"at {cur.date.isoformat()}"
                )

    def __len__(self) -> int:
        return len(self.bars)


@dataclass
class ProviderConfig:
    """Connection settings for the quote provider plus the local cache root.

    ``api_key`` falls back to the EVENTLENS_API_KEY environment variable.
    ``rate_limit`` is the maximum number of requests in any sliding
    60-second window, shared by all fetches made through this config.
    """

    cache_dir: Path
    base_url: str = DEFAULT_BASE_URL
    api_key: str = ""
    rate_limit: int = 5

    def __post_init__(self) -> None:
        self.cache_dir = Path(self.cache_dir)
        if not self.api_key:
            self.api_key = os.environ.get(API_KEY_ENV, "")
        if self.rate_limit < 1:
            raise ConfigError(f"rate_limit must be >= 1, got {self.rate_limit}")
        self._limiter = RateLimiter(self.rate_limit)

    @property
    def limiter(self) -> "RateLimiter":
        return self._limiter


class RateLimiter:
    """Sliding-window limiter: at most ``max_per_minute`` acquisitions in any 60 s span.

    ``clock`` and ``sleep`` are injectable so tests can drive a fake clock.
    """

    WINDOW_SECONDS = 60.0

    def __init__(
        self,
        max_per_minute: int,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if max_per_minute < 1:
            raise ConfigError(f"rate limit must be >= 1, got {max_per_minute}")
        self._max = max_per_minute
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        """Block until another request is allowed, then record it."""
        with self._lock:
            while True:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= self.WINDOW_SECONDS:
                    self._stamps.popleft()
                if len(self._stamps) < self._max:
                    self._stamps.append(now)
                    return
                self._sleep(self.WINDOW_SECONDS - (now - self._stamps[0]))


# --- provider wire format ---------------------------------------------------

_PROVIDER_ERROR_KEYS = ("Error Message", "Note", "Information")
_DATE_KEY = re.compile(r"\d{4}-\d{2}-\d{2}$")
# Accepts bare field names and numbered variants like "1. open"; deliberately
# rejects derived fields such as "5. adjusted close".
_FIELD_KEY = re.compile(r"(?:\d+[a-z]?\.\s*)?(open|high|low|close)$")


def _daily_query(symbol: str) -> dict[str, str]:
    return {"function": "TIME_SERIES_DAILY", "symbol": symbol, "outputsize": "full"}


def _fx_query(symbol: str) -> dict[str, str]:
    if len(symbol) != 6 or not symbol.isalpha():
        raise ConfigError(f"fx_pair symbol must be 6 letters like RUBCNY, got {symbol!r}")
    return {
        "function": "FX_DAILY",
        "from_symbol": symbol[:3],
        "to_symbol": symbol[3:],
        "outputsize": "full",
    }


QUERY_BUILDERS: dict[InstrumentKind, Callable[[str], dict[str, str]]] = {
    InstrumentKind.CURRENCY_INDEX: _daily_query,
    InstrumentKind.EQUITY: _daily_query,
    InstrumentKind.COMMODITY: _daily_query,
    InstrumentKind.FX_PAIR: _fx_query,
}


def provider_url(instrument: InstrumentId, config: ProviderConfig) -> str:
    """Build the provider GET URL for one instrument."""
    params = QUERY_BUILDERS[instrument.kind](instrument.symbol)
    params["apikey"] = config.api_key
    return f"{config.base_url}?{urllib.parse.urlencode(params)}"


def _http_get(url: str, timeout: float = 30.0) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read()


def _match_fields(entry: dict) -> dict[str, str]:
    found: dict[str, str] = {}
    for key, value in entry.items():
        match = _FIELD_KEY.fullmatch(str(key).strip().lower())
        if match:
            found.setdefault(match.group(1), value)
    return found


def _parse_quote(raw: object, date_str: str, field_name: str) -> float:
    try:
        return float(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise DataFormatError(
            f"unparseable {field_name} quote {raw!r} for {date_str}"
        ) from None


def parse_provider_payload(body: bytes, instrument: InstrumentId) -> RawSeries:
    """Parse the provider's daily-series JSON document into a RawSeries.

    The instrument identity comes from the caller: the wire metadata block
    is provider-variant and not trusted for routing. Entries quoting only a
    close get open=high=low=close synthesized and the series flagged.
    """
    try:
        document = json.loads(body)
    except (ValueError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"payload is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise DataFormatError("payload is not a JSON object")

    for key in _PROVIDER_ERROR_KEYS:
        if key in document:
            raise ProviderError(f"provider error for {instrument.symbol}: {document[key]}")

    series_map = None
    for value in document.values():
        if (
            isinstance(value, dict)
            and value
            and all(isinstance(k, str) and _DATE_KEY.fullmatch(k) for k in value)
            and all(isinstance(v, dict) for v in value.values())
        ):
            series_map = value
            break
    if series_map is None:
        raise DataFormatError(f"payload for {instrument.symbol} has no daily series map")

    bars = []
    synthesized = False
    for date_str in sorted(series_map):
        try:
            date = dt.date.fromisoformat(date_str)
        except ValueError as exc:
            raise DataFormatError(f"bad date key {date_str!r}") from exc
        fields = _match_fields(series_map[date_str])
        if "close" not in fields:
            raise DataFormatError(f"entry {date_str} has no close quote")
        close = _parse_quote(fields["close"], date_str, "close")
        if all(name in fields for name in ("open", "high", "low")):
            bar = DailyBar(
                date=date,
                open=_parse_quote(fields["open"], date_str, "open"),
                high=_parse_quote(fields["high"], date_str, "high"),
                low=_parse_quote(fields["low"], date_str, "low"),
                close=close,
            )
        elif not any(name in fields for name in ("open", "high", "low")):
            bar = DailyBar(date=date, open=close, high=close, low=close, close=close)
            synthesized = True
        else:
            raise DataFormatError(f"entry {date_str} has a partial OHLC set")
        bars.append(bar)

    return RawSeries(instrument, tuple(bars), synthetic_ohlc=synthesized)


# --- CSV fixture / cache format ----------------------------------------------

def series_to_csv_bytes(series: RawSeries) -> bytes:
    """Serialize to the bit-exact CSV format: LF newlines, shortest
    round-trip decimals, single trailing newline."""
    lines = [CSV_HEADER]
    for bar in series.bars:
        lines.append(
            f"{bar.date.isoformat()},{bar.open!r},{bar.high!r},{bar.low!r},{bar.close!r}"
        )
    return ("\n".join(lines) + "\n").encode("ascii")


_write_locks: dict[str, threading.Lock] = {}
_write_locks_guard = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    key = str(path.resolve())
    with _write_locks_guard:
        return _write_locks.setdefault(key, threading.Lock())


def write_csv(series: RawSeries, path: Path) -> None:
    """Write a series atomically (temp file + rename); exclusive per path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = series_to_csv_bytes(series)
    with _lock_for(path):
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(payload)
        os.replace(tmp, path)


def load_csv(path: Path, instrument: InstrumentId) -> RawSeries:
    """Load a CSV fixture or cache file, enforcing every bar invariant.

    Duplicate dates, a wrong header, or any malformed row fail the whole
    load. An empty body under a valid header yields an empty series.
    """
    path = Path(path)
    try:
        text = path.read_bytes().decode("ascii")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path}: not ASCII: {exc}") from exc
    if "\r" in text:
        # CRLF files would not round-trip byte-exactly and would silently
        # change data digests on the next cache rewrite
        raise DataFormatError(f"{path}: carriage returns found; the format is LF-only")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != CSV_HEADER:
        raise DataFormatError(f"{path}: expected header {CSV_HEADER!r}")

    bars = []
    seen: set[dt.date] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise DataFormatError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            date = dt.date.fromisoformat(parts[0])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad date {parts[0]!r}") from exc
        if date in seen:
            raise DataFormatError(f"{path}:{lineno}: duplicate date {date.isoformat()}")
        seen.add(date)
        quotes = [
            _parse_quote(raw, date.isoformat(), name)
            for raw, name in zip(parts[1:], ("open", "high", "low", "close"))
        ]
        bars.append(DailyBar(date, *quotes))

    bars.sort(key=lambda bar: bar.date)
    return RawSeries(instrument, tuple(bars))


def fetch_daily(
    instrument: InstrumentId,
    config: ProviderConfig,
    transport: Transport | None = None,
) -> RawSeries:
    """Return the instrument's full daily history, cache-first.

    A warm cache entry is returned without touching the network. On a cache
    miss the provider is queried (through ``transport``, injectable for
    tests), the response parsed, and the cache file written atomically.

    Args:
        instrument: what to fetch.
        config: provider endpoint, key, rate limit, and cache root.
        transport: callable mapping a URL to response bytes; defaults to
            an HTTP GET.
    """
    cache_path = config.cache_dir / f"{instrument.symbol}.csv"
    if cache_path.exists():
        return load_csv(cache_path, instrument)

    if transport is None and not config.api_key:
        raise ConfigError(
            f"api key required to fetch {instrument.symbol}; "
            f"set {API_KEY_ENV} or ProviderConfig.api_key"
        )
    send = transport if transport is not None else _http_get
    config.limiter.acquire()
    url = provider_url(instrument, config)
    try:
        body = send(url)
    except EventLensError:
        raise
    except Exception as exc:
        raise ProviderError(f"provider unreachable for {instrument.symbol}: {exc}") from exc

    series = parse_provider_payload(body, instrument)
    try:
        write_csv(series, cache_path)
    except OSError as exc:
        raise CacheError(f"cannot write cache file {cache_path}: {exc}") from exc
    return series


def fetch_universe(
    instruments: Iterable[InstrumentId],
    config: ProviderConfig,
    transport: Transport | None = None,
) -> list[RawSeries]:
    """Fetch several instruments through one shared rate limiter."""
    return [fetch_daily(instrument, config, transport) for instrument in instruments]
