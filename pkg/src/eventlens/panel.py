"""Date-aligned, fully dense panels built from raw daily series.

Alignment is an inner join on dates: any day absent from any input series
is dropped for all of them. Forward-filling is deliberately not offered
because it would manufacture flat quotes around exactly the dates an event
study cares about. Panels are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import datetime as dt
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, PanelError
from .ingest import RawSeries


class BarField(str, Enum):
    OPEN = "open"
    HIGH = "high"
    LOW = "low"
    CLOSE = "close"


FIELD_ORDER: tuple[BarField, ...] = (BarField.OPEN, BarField.HIGH, BarField.LOW, BarField.CLOSE)


@dataclass(frozen=True)
class ColumnKey:
    """Identifies one panel column: an instrument symbol plus a bar field."""

    symbol: str
    field: BarField

    def __post_init__(self) -> None:
        if not self.symbol or "." in self.symbol or "," in self.symbol:
            raise ConfigError(f"bad column symbol {self.symbol!r}")
        if not isinstance(self.field, BarField):
            try:
                object.__setattr__(self, "field", BarField(self.field))
            except ValueError:
                raise ConfigError(f"unknown bar field {self.field!r}") from None

    @property
    def name(self) -> str:
        return f"{self.symbol}.{self.field.value}"

    @classmethod
    def parse(cls, name: str) -> "ColumnKey":
        symbol, sep, field = name.rpartition(".")
        if not sep or not symbol:
            raise ConfigError(f"column name must look like SYMBOL.field, got {name!r}")
        try:
            return cls(symbol, BarField(field))
        except ValueError:
            raise ConfigError(f"unknown bar field in column name {name!r}") from None

    def sort_key(self) -> tuple[str, int]:
        return (self.symbol, FIELD_ORDER.index(self.field))


@dataclass(frozen=True)
class DateWindow:
    """A closed calendar interval, inclusive on both ends."""

    start: dt.date
    end: dt.date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ConfigError(f"window start {self.start} after end {self.end}")

    def contains(self, date: dt.date) -> bool:
        return self.start <= date <= self.end

    def intersect(self, other: "DateWindow") -> "DateWindow | None":
        start = max(self.start, other.start)
        end = min(self.end, other.end)
        return DateWindow(start, end) if start <= end else None

    def __str__(self) -> str:
        return f"{self.start.isoformat()}..{self.end.isoformat()}"


class AlignedPanel:
    """A date-indexed matrix of named columns with no missing cells.

    Columns are stored in canonical (symbol, field) order and exposed as
    read-only float arrays, each exactly as long as the date index.
    """

    __slots__ = ("_dates", "_columns")

    def __init__(
        self,
        dates: Sequence[dt.date],
        columns: Mapping[ColumnKey, Sequence[float] | np.ndarray],
    ) -> None:
        dates_t = tuple(dates)
        if not dates_t:
            raise PanelError("panel requires at least one date")
        for prev, cur in zip(dates_t, dates_t[1:]):
            if cur <= prev:
                raise PanelError(f"panel dates not strictly increasing at {cur.isoformat()}")
        if not columns:
            raise PanelError("panel requires at least one column")

        stored: dict[ColumnKey, np.ndarray] = {}
        for key in sorted(columns, key=ColumnKey.sort_key):
            array = np.array(columns[key], dtype=float)
            if array.ndim != 1 or array.shape[0] != len(dates_t):
                raise PanelError(
                    f"column {key.name} has {array.shape} values for {len(dates_t)} dates"
                )
            if not np.all(np.isfinite(array)):
                raise PanelError(f"column {key.name} contains non-finite cells")
            array.flags.writeable = False
            stored[key] = array
        self._dates = dates_t
        self._columns = stored

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return self._dates

    @property
    def keys(self) -> tuple[ColumnKey, ...]:
        return tuple(self._columns)

    @property
    def n_rows(self) -> int:
        return len(self._dates)

    def column(self, key: ColumnKey) -> np.ndarray:
        try:
            return self._columns[key]
        except KeyError:
            raise PanelError(f"unknown column {key.name}") from None

    def matrix(self, keys: Iterable[ColumnKey]) -> np.ndarray:
        """Stack the requested columns into an (n_rows, n_keys) array."""
        return np.column_stack([self.column(key) for key in keys])

    def slice(self, window: DateWindow) -> "AlignedPanel":
        """Rows with window.start <= date <= window.end, all columns alike."""
        lo = bisect_left(self._dates, window.start)
        hi = bisect_right(self._dates, window.end)
        if lo >= hi:
            raise PanelError(f"window {window} contains no panel dates")
        return AlignedPanel(
            self._dates[lo:hi], {key: arr[lo:hi] for key, arr in self._columns.items()}
        )

    def to_csv_bytes(self) -> bytes:
        lines = ["date," + ",".join(key.name for key in self._columns)]
        for i, date in enumerate(self._dates):
            cells = ",".join(repr(float(arr[i])) for arr in self._columns.values())
            lines.append(f"{date.isoformat()},{cells}")
        return ("\n".join(lines) + "\n").encode("ascii")


def align(series_set: Iterable[RawSeries], fields: Iterable[BarField] = FIELD_ORDER) -> AlignedPanel:
    """Inner-join a set of raw series into one dense panel.

    The panel's dates are the sorted intersection of every input's dates;
    one column is produced per (instrument, requested field). Input order
    does not matter: columns come out in canonical order either way.
    """
    series_list = list(series_set)
    if not series_list:
        raise PanelError("align requires at least one series")
    wanted = set(fields)
    field_list = tuple(f for f in FIELD_ORDER if f in wanted)
    if not field_list:
        raise PanelError("align requires at least one bar field")

    seen: set[str] = set()
    for series in series_list:
        symbol = series.instrument.symbol
        if symbol in seen:
            raise PanelError(f"duplicate instrument symbol {symbol}")
        seen.add(symbol)
        if not series.bars:
            raise PanelError(f"series {symbol} is empty")

    common: set[dt.date] = {bar.date for bar in series_list[0].bars}
    for series in series_list[1:]:
        common &= {bar.date for bar in series.bars}
    if not common:
        raise PanelError("series share no common dates")
    dates = tuple(sorted(common))

    columns: dict[ColumnKey, np.ndarray] = {}
    for series in series_list:
        by_date = {bar.date: bar for bar in series.bars}
        for field in field_list:
            values = np.array([getattr(by_date[d], field.value) for d in dates], dtype=float)
            columns[ColumnKey(series.instrument.symbol, field)] = values
    return AlignedPanel(dates, columns)
