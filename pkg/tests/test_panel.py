from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from eventlens import ConfigError, PanelError
from eventlens.panel import AlignedPanel, BarField, ColumnKey, DateWindow, align

from conftest import make_series, random_series

D = dt.date


def closes(symbol: str) -> ColumnKey:
    return ColumnKey(symbol, BarField.CLOSE)


# --- DateWindow ----------------------------------------------------------------


def test_window_rejects_reversed_bounds():
    with pytest.raises(ConfigError):
        DateWindow(D(2022, 2, 1), D(2022, 1, 1))


def test_window_contains_and_intersect():
    w = DateWindow(D(2022, 1, 1), D(2022, 2, 1))
    assert w.contains(D(2022, 2, 1)) and w.contains(D(2022, 1, 1))
    assert not w.contains(D(2022, 2, 2))
    other = DateWindow(D(2022, 1, 15), D(2022, 3, 1))
    assert w.intersect(other) == DateWindow(D(2022, 1, 15), D(2022, 2, 1))
    assert w.intersect(DateWindow(D(2023, 1, 1), D(2023, 2, 1))) is None


# --- ColumnKey -------------------------------------------------------------------


def test_column_key_name_and_parse_round_trip():
    key = ColumnKey("GOLD", BarField.CLOSE)
    assert key.name == "GOLD.close"
    assert ColumnKey.parse("GOLD.close") == key


def test_column_key_parse_rejects_garbage():
    with pytest.raises(ConfigError):
        ColumnKey.parse("GOLD")
    with pytest.raises(ConfigError):
        ColumnKey.parse("GOLD.volume")


# --- align -----------------------------------------------------------------------


def test_align_intersects_dates():
    a = make_series("A", D(2022, 1, 3), [1.0, 2.0, 3.0])  # d1..d3
    b = make_series("B", D(2022, 1, 4), [5.0, 6.0, 7.0])  # d2..d4
    panel = align([a, b], fields={BarField.CLOSE})
    assert panel.dates == (D(2022, 1, 4), D(2022, 1, 5))
    np.testing.assert_array_equal(panel.column(closes("A")), [2.0, 3.0])
    np.testing.assert_array_equal(panel.column(closes("B")), [5.0, 6.0])


def test_align_single_series_identity():
    series = make_series("A", D(2022, 1, 3), [1.0, 2.0, 3.0])
    panel = align([series], fields={BarField.CLOSE})
    assert panel.keys == (closes("A"),)
    np.testing.assert_array_equal(panel.column(closes("A")), [1.0, 2.0, 3.0])


def test_align_disjoint_dates_is_an_error():
    a = make_series("A", D(2022, 1, 3), [1.0])
    b = make_series("B", D(2022, 2, 3), [2.0])
    with pytest.raises(PanelError, match="no common dates"):
        align([a, b])


def test_align_duplicate_symbols_rejected():
    a = make_series("A", D(2022, 1, 3), [1.0, 2.0])
    also_a = make_series("A", D(2022, 1, 3), [3.0, 4.0])
    with pytest.raises(PanelError, match="duplicate instrument symbol A"):
        align([a, also_a])


def test_align_rejects_empty_inputs():
    with pytest.raises(PanelError):
        align([])
    from eventlens import RawSeries
    from conftest import make_instrument

    with pytest.raises(PanelError, match="empty"):
        align([RawSeries(make_instrument("A"), ())])


def test_align_is_order_insensitive(rng):
    series = [random_series(f"S{i}", 30, rng) for i in range(4)]
    forward = align(series)
    backward = align(list(reversed(series)))
    assert forward.dates == backward.dates
    assert forward.keys == backward.keys
    for key in forward.keys:
        np.testing.assert_array_equal(forward.column(key), backward.column(key))


def test_align_field_subset_keeps_canonical_order():
    series = make_series("A", D(2022, 1, 3), [1.0, 2.0])
    panel = align([series], fields={BarField.CLOSE, BarField.OPEN})
    assert panel.keys == (ColumnKey("A", BarField.OPEN), ColumnKey("A", BarField.CLOSE))


def test_align_copies_cells_verbatim():
    series = make_series("A", D(2022, 1, 3), [1.25, 2.5])
    panel = align([series])
    np.testing.assert_array_equal(panel.column(ColumnKey("A", BarField.OPEN)), [1.25, 2.5])
    np.testing.assert_array_equal(panel.column(ColumnKey("A", BarField.HIGH)), [2.25, 3.5])


# --- slice -------------------------------------------------------------------------


@pytest.fixture
def week_panel():
    return align([make_series("A", D(2022, 1, 3), [1.0, 2.0, 3.0, 4.0, 5.0])])


def test_slice_full_window_is_identity(week_panel):
    window = DateWindow(D(2022, 1, 1), D(2022, 1, 10))
    sliced = week_panel.slice(window)
    assert sliced.dates == week_panel.dates
    for key in week_panel.keys:
        np.testing.assert_array_equal(sliced.column(key), week_panel.column(key))


def test_slice_single_date(week_panel):
    sliced = week_panel.slice(DateWindow(D(2022, 1, 4), D(2022, 1, 4)))
    assert sliced.dates == (D(2022, 1, 4),)
    np.testing.assert_array_equal(sliced.column(closes("A")), [2.0])


def test_slice_window_before_first_date_errors(week_panel):
    with pytest.raises(PanelError, match="no panel dates"):
        week_panel.slice(DateWindow(D(2021, 1, 1), D(2021, 12, 31)))


def test_slice_bounds_are_inclusive(week_panel):
    sliced = week_panel.slice(DateWindow(D(2022, 1, 4), D(2022, 1, 6)))
    assert sliced.dates == (D(2022, 1, 4), D(2022, 1, 5), D(2022, 1, 6))


def test_slice_composition_equals_intersection(rng):
    panel = align([random_series("A", 60, rng), random_series("B", 60, rng)])
    first, last = panel.dates[0], panel.dates[-1]
    for _ in range(25):
        offsets = rng.integers(-10, 80, size=4)
        a, b = sorted(int(v) for v in offsets[:2])
        c, d = sorted(int(v) for v in offsets[2:])
        w1 = DateWindow(first + dt.timedelta(a), first + dt.timedelta(b))
        w2 = DateWindow(first + dt.timedelta(c), first + dt.timedelta(d))
        both = w1.intersect(w2)
        try:
            nested = panel.slice(w1).slice(w2)
        except PanelError:
            continue
        assert both is not None
        direct = panel.slice(both)
        assert nested.dates == direct.dates
        for key in panel.keys:
            np.testing.assert_array_equal(nested.column(key), direct.column(key))
        assert last >= nested.dates[-1]


# --- column / construction ------------------------------------------------------------


def test_column_unknown_key_names_it(week_panel):
    with pytest.raises(PanelError, match="B.close"):
        week_panel.column(closes("B"))


def test_column_matches_source_bars():
    series = make_series("A", D(2022, 1, 3), [10.0, 20.0, 30.0])
    panel = align([series])
    np.testing.assert_array_equal(
        panel.column(closes("A")), [bar.close for bar in series.bars]
    )


def test_columns_are_read_only(week_panel):
    with pytest.raises(ValueError):
        week_panel.column(closes("A"))[0] = 99.0


def test_every_column_length_matches_dates(rng):
    for _ in range(10):
        n = int(rng.integers(2, 40))
        panel = align([random_series("A", n, rng), random_series("B", n, rng)])
        for key in panel.keys:
            assert panel.column(key).shape == (panel.n_rows,)


def test_constructor_rejects_length_mismatch():
    with pytest.raises(PanelError, match="A.close"):
        AlignedPanel([D(2022, 1, 3), D(2022, 1, 4)], {closes("A"): [1.0]})


def test_constructor_rejects_non_finite_cells():
    with pytest.raises(PanelError, match="non-finite"):
        AlignedPanel([D(2022, 1, 3)], {closes("A"): [float("nan")]})


def test_constructor_rejects_unordered_dates():
    with pytest.raises(PanelError, match="strictly increasing"):
        AlignedPanel([D(2022, 1, 4), D(2022, 1, 3)], {closes("A"): [1.0, 2.0]})


def test_csv_export_layout():
    panel = align([make_series("A", D(2022, 1, 3), [1.5, 2.5])], fields={BarField.CLOSE})
    expected = b"date,A.close\n2022-01-03,1.5\n2022-01-04,2.5\n"
    assert panel.to_csv_bytes() == expected
