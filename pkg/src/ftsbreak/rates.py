"""Age-by-year rate tables read from CSV files.

Two layouts are accepted:

* wide: header ``Age,Y1921,Y1922,...`` (a leading ``Y`` on year columns is optional),
  one row per age;
* long: header ``Year,Age,Rate``, one row per cell.

``.`` or an empty cell marks a missing value. Ages such as ``110+`` are read as 110.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .fda import FunctionalTimeSeries, log_transform

MISSING = {"", "."}
MAX_MASKED_FRACTION = 0.10


@dataclass(frozen=True, eq=False)
class RateTable:
    """Rates indexed by (age, year); ``mask`` flags missing cells."""

    ages: np.ndarray
    years: np.ndarray
    rates: np.ndarray
    mask: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        ages = np.asarray(self.ages)
        years = np.asarray(self.years)
        if ages.size < 2 or years.size < 4:
            raise DataError(f"need at least 2 ages and 4 years, got {ages.size} x {years.size}")
        for name, v in (("ages", ages), ("years", years)):
            if np.any(np.diff(v) <= 0):
                raise DataError(f"{name} must be strictly increasing")
        if self.rates.shape != (ages.size, years.size) or self.mask.shape != self.rates.shape:
            raise DataError("rate matrix shape does not match the age and year headers")
        observed = self.rates[~self.mask]
        if not np.all(np.isfinite(observed)):
            raise DataError("unmasked rates must be finite")
        if np.any(observed < 0):
            i, j = np.argwhere((self.rates < 0) & ~self.mask)[0]
            raise DataError(f"negative rate at age {ages[i]}, year {years[j]}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rates.shape

    @property
    def n_masked(self) -> int:
        return int(self.mask.sum())

    def equals(self, other: "RateTable") -> bool:
        return (
            np.array_equal(self.ages, other.ages)
            and np.array_equal(self.years, other.years)
            and np.array_equal(self.mask, other.mask)
            and np.array_equal(self.rates[~self.mask], other.rates[~other.mask])
        )


def _parse_int(text: str, what: str, row: int, col: int) -> int:
    t = text.strip()
    if t.endswith("+"):
        t = t[:-1]
    if t[:1] in ("Y", "y") and what == "year":
        t = t[1:]
    try:
        return int(t)
    except ValueError:
        raise DataError(f"non-numeric {what} {text!r} at row {row}, column {col}") from None


def _parse_rate(text: str, row: int, col: int) -> float:
    t = text.strip()
    if t in MISSING:
        return np.nan
    try:
        v = float(t)
    except ValueError:
        raise DataError(f"non-numeric cell {text!r} at row {row}, column {col}") from None
    if not np.isfinite(v):
        raise DataError(f"non-finite cell {text!r} at row {row}, column {col}")
    return v


def _read_wide(rows: list[list[str]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    header = rows[0]
    if not header or header[0].strip().lower() != "age" or len(header) < 2:
        raise DataError("wide layout needs a header 'Age,<year>,<year>,...'")
    years = [_parse_int(h, "year", 1, j + 1) for j, h in enumerate(header[1:], start=1)]
    ages, vals = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} cells, header has {len(header)}")
        ages.append(_parse_int(row[0], "age", i, 1))
        vals.append([_parse_rate(c, i, j + 1) for j, c in enumerate(row[1:], start=1)])
    if len(set(ages)) != len(ages):
        raise DataError("duplicate age rows")
    if len(set(years)) != len(years):
        raise DataError("duplicate year columns")
    return np.array(ages), np.array(years), np.array(vals, dtype=float).reshape(len(ages), len(years))


def _read_long(rows: list[list[str]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    header = [h.strip().lower() for h in rows[0]]
    try:
        iy, ia, ir = header.index("year"), header.index("age"), header.index("rate")
    except ValueError:
        raise DataError("long layout needs a header with columns Year,Age,Rate") from None
    cells = {}
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} cells, header has {len(header)}")
        key = (_parse_int(row[ia], "age", i, ia + 1), _parse_int(row[iy], "year", i, iy + 1))
        if key in cells:
            raise DataError(f"duplicate (age, year) = {key} at row {i}")
        cells[key] = _parse_rate(row[ir], i, ir + 1)
    ages = np.array(sorted({a for a, _ in cells}))
    years = np.array(sorted({y for _, y in cells}))
    rates = np.full((ages.size, years.size), np.nan)
    ai = {a: k for k, a in enumerate(ages)}
    yi = {y: k for k, y in enumerate(years)}
    for (a, y), v in cells.items():
        rates[ai[a], yi[y]] = v
    return ages, years, rates


def read_rates_csv(path, layout: str = "wide") -> RateTable:
    """Read an age x year rate table in ``wide`` or ``long`` layout."""
    path = Path(path)
    raw = path.read_bytes()
    text = raw.decode("utf-8-sig")
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DataError(f"{path} is empty")
    if layout == "wide":
        ages, years, rates = _read_wide(rows)
    elif layout == "long":
        ages, years, rates = _read_long(rows)
    else:
        raise ValueError(f"layout must be 'wide' or 'long', got {layout!r}")
    order_a, order_y = np.argsort(ages), np.argsort(years)
    ages, years, rates = ages[order_a], years[order_y], rates[np.ix_(order_a, order_y)]
    mask = np.isnan(rates)
    return RateTable(ages, years, np.where(mask, 0.0, rates), mask, hashlib.sha256(raw).hexdigest())


def write_rates_csv(table: RateTable, path, layout: str = "wide") -> None:
    """Write a table in either layout; masked cells become ``.``."""

    def cell(i, j):
        return "." if table.mask[i, j] else repr(float(table.rates[i, j]))

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if layout == "wide":
            w.writerow(["Age"] + [f"Y{y}" for y in table.years])
            for i, a in enumerate(table.ages):
                w.writerow([a] + [cell(i, j) for j in range(table.years.size)])
        elif layout == "long":
            w.writerow(["Year", "Age", "Rate"])
            for j, y in enumerate(table.years):
                for i, a in enumerate(table.ages):
                    w.writerow([y, a, cell(i, j)])
        else:
            raise ValueError(f"layout must be 'wide' or 'long', got {layout!r}")


def make_rate_table(ages, years, rates, mask=None) -> RateTable:
    rates = np.asarray(rates, dtype=float)
    mask = np.isnan(rates) if mask is None else np.asarray(mask, dtype=bool)
    rates = np.where(mask, 0.0, rates)
    digest = hashlib.sha256(
        np.ascontiguousarray(ages, dtype=np.int64).tobytes()
        + np.ascontiguousarray(years, dtype=np.int64).tobytes()
        + np.ascontiguousarray(rates).tobytes()
        + mask.tobytes()
    ).hexdigest()
    return RateTable(np.asarray(ages), np.asarray(years), rates, mask, digest)


def fill_masked(table: RateTable, max_fraction: float = MAX_MASKED_FRACTION) -> np.ndarray:
    """Rates with masked cells linearly interpolated across years within each age.

    Gaps at either end of an age row take the nearest observed value.
    """
    if table.mask.mean() > max_fraction:
        raise DataError(f"{table.n_masked} masked cells exceed {max_fraction:.0%} of the table")
    out = table.rates.copy()
    for i in np.flatnonzero(table.mask.any(axis=1)):
        ok = ~table.mask[i]
        if not ok.any():
            raise DataError(f"age {table.ages[i]} has no observed rates")
        out[i, ~ok] = np.interp(table.years[~ok], table.years[ok], table.rates[i, ok])
    return out


def to_fts(
    table: RateTable,
    transform: str = "none",
    zero_policy: str = "half_min",
    max_masked: float = MAX_MASKED_FRACTION,
) -> FunctionalTimeSeries:
    """One curve per year on the age grid, labelled by year."""
    rates = fill_masked(table, max_masked)
    fts = FunctionalTimeSeries(table.ages.astype(float), rates.T, table.years.astype(int))
    if transform == "none":
        return fts
    if transform == "log10":
        return log_transform(fts, 10, zero_policy)
    raise ValueError(f"transform must be 'none' or 'log10', got {transform!r}")
