#!/usr/bin/env python3
"""Brute-force re-derivation of the synthetic-fixture results.

Recomputes everything the pipeline produces for the committed fixture,
independently of the library: plain csv parsing, an inner join written as
loops, ordinary least squares via the normal equations solved with exact
rational arithmetic (fractions.Fraction over Gaussian elimination), and
error metrics and correlations accumulated as exact rationals before a
single final float conversion.

Because float64 values are dyadic rationals, the normal-equations solve
here is exact: the emitted weights are the true least-squares minimizers
of the fixture data to full precision. Tests compare the library's
orthogonal-decomposition fit against these numbers.

Writes tests/fixtures/golden/derived_expectations.json. Deterministic.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = ROOT / "tests" / "fixtures" / "synthetic"
GOLDEN_DIR = ROOT / "tests" / "fixtures" / "golden"

CONFIGS = ("scenario_clean.json", "scenario_noisy.json", "scenario_noisy_dateshift.json")


def read_series(path: Path) -> dict[str, dict[str, Fraction]]:
    rows = {}
    lines = path.read_text(encoding="ascii").splitlines()
    assert lines[0] == "date,open,high,low,close", path
    for line in lines[1:]:
        date, o, h, l, c = line.split(",")
        rows[date] = {
            "open": Fraction(float(o)),
            "high": Fraction(float(h)),
            "low": Fraction(float(l)),
            "close": Fraction(float(c)),
        }
    return rows


def inner_join_dates(series_by_symbol: dict) -> list[str]:
    symbols = list(series_by_symbol)
    common = set(series_by_symbol[symbols[0]])
    for symbol in symbols[1:]:
        common &= set(series_by_symbol[symbol])
    return sorted(common)


def column(series_by_symbol, dates, name: str) -> list[Fraction]:
    symbol, field = name.rsplit(".", 1)
    return [series_by_symbol[symbol][d][field] for d in dates]


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with partial pivoting, exact over Fractions."""
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(M[r][col]))
        assert M[pivot][col] != 0, "singular normal equations"
        M[col], M[pivot] = M[pivot], M[col]
        for row in range(col + 1, n):
            factor = M[row][col] / M[col][col]
            for k in range(col, n + 1):
                M[row][k] -= factor * M[col][k]
    x = [Fraction(0)] * n
    for row in range(n - 1, -1, -1):
        acc = M[row][n]
        for k in range(row + 1, n):
            acc -= M[row][k] * x[k]
        x[row] = acc / M[row][row]
    return x


def normal_equation_weights(X: list[list[Fraction]], y: list[Fraction]) -> list[Fraction]:
    p = len(X[0])
    XtX = [[sum(row[i] * row[j] for row in X) for j in range(p)] for i in range(p)]
    Xty = [sum(row[i] * yi for row, yi in zip(X, y)) for i in range(p)]
    return solve_exact(XtX, Xty)


def metrics(true: list[Fraction], pred: list[Fraction]) -> dict:
    n = len(true)
    errors = [t - p for t, p in zip(true, pred)]
    mse = sum(e * e for e in errors) / n
    mae = sum(abs(e) for e in errors) / n
    mape = sum(abs(e) / abs(t) for e, t in zip(errors, true)) / n * 100
    return {
        "mse": float(mse),
        "rmse": math.sqrt(float(mse)),
        "mae": float(mae),
        "mape": float(mape),
        "n": n,
    }


def pearson_exact(x: list[Fraction], y: list[Fraction]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return float(sxy) / math.sqrt(float(sxx) * float(syy))


def in_window(dates: list[str], bounds: dict) -> list[str]:
    return [d for d in dates if bounds["start"] <= d <= bounds["end"]]


def derive(config_name: str) -> dict:
    document = json.loads((FIXTURE_DIR / config_name).read_text())
    scenario = document["scenario"]
    variant = document["provider"]["cache_dir"]
    symbols = [entry["symbol"] for entry in scenario["universe"]]
    series = {s: read_series(FIXTURE_DIR / variant / f"{s}.csv") for s in symbols}
    dates = inner_join_dates(series)

    train = in_window(dates, scenario["train_window"])
    test = in_window(dates, scenario["test_window"])
    source = in_window(dates, scenario["source_window"])
    projection = in_window(dates, scenario["projection_window"])

    correlations = {}
    for side in ("correlation_before", "correlation_after"):
        sub = in_window(dates, scenario[side])
        closes = [column(series, sub, f"{s}.close") for s in symbols]
        n = len(symbols)
        values = [[1.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                values[i][j] = values[j][i] = pearson_exact(closes[i], closes[j])
        correlations[side] = {"labels": [f"{s}.close" for s in symbols], "values": values}

    mode = scenario["projection_mode"]
    targets = {}
    for spec in scenario["feature_specs"]:
        target_symbol = spec["target"].rsplit(".", 1)[0]
        feature_names = spec["features"]

        def design(rows: list[str]) -> list[list[Fraction]]:
            cols = [column(series, rows, name) for name in feature_names]
            return [[Fraction(1)] + [col[i] for col in cols] for i in range(len(rows))]

        weights = normal_equation_weights(design(train), column(series, train, spec["target"]))

        def predictions(rows: list[str]) -> list[Fraction]:
            return [sum(w * x for w, x in zip(weights, row)) for row in design(rows)]

        test_metrics = metrics(column(series, test, spec["target"]), predictions(test))

        if mode == "oracle_features":
            counterfactual = predictions(projection)
        else:
            source_rows = design(source)
            cycled = [source_rows[i % len(source_rows)] for i in range(len(projection))]
            counterfactual = [sum(w * x for w, x in zip(weights, row)) for row in cycled]
        realized = column(series, projection, spec["target"])
        divergence = metrics(realized, counterfactual)

        targets[target_symbol] = {
            "weights": [float(w) for w in weights],
            "test_metrics": test_metrics,
            "counterfactual": [float(v) for v in counterfactual],
            "realized": [float(v) for v in realized],
            "divergence_metrics": divergence,
            "projection_dates": projection,
        }

    cycles = 1 if mode == "oracle_features" else -(-len(projection) // len(source))
    return {
        "projection_mode": mode,
        "projection_cycles": cycles,
        "correlation_before": correlations["correlation_before"],
        "correlation_after": correlations["correlation_after"],
        "targets": targets,
    }


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    expectations = {name: derive(name) for name in CONFIGS}
    out = GOLDEN_DIR / "derived_expectations.json"
    out.write_text(json.dumps(expectations, indent=2) + "\n", encoding="ascii")
    print(f"derived expectations written to {out}")


if __name__ == "__main__":
    main()
