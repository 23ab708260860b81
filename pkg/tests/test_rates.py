from pathlib import Path

import numpy as np
import pytest

from ftsbreak.errors import DataError
from ftsbreak.rates import make_rate_table, read_rates_csv, to_fts, write_rates_csv

DATA = Path(__file__).parent / "data"


def test_wide_fixture_shape():
    t = read_rates_csv(DATA / "wide_3x4.csv")
    assert t.shape == (3, 4)
    np.testing.assert_array_equal(t.ages, [0, 1, 2])
    np.testing.assert_array_equal(t.years, [2000, 2001, 2002, 2003])
    assert t.rates[0, 3] == 0.0052 and t.n_masked == 0


def test_long_equals_wide():
    wide = read_rates_csv(DATA / "wide_3x4.csv")
    long = read_rates_csv(DATA / "long_3x4.csv", layout="long")
    assert wide.equals(long)
    np.testing.assert_array_equal(wide.rates, long.rates)


def test_masked_cell():
    t = read_rates_csv(DATA / "masked_3x4.csv")
    assert t.n_masked == 1 and t.mask[1, 1]


def test_round_trip_both_layouts(tmp_path, rng):
    rates = rng.uniform(0.001, 0.1, (5, 7))
    rates[2, 3] = np.nan
    table = make_rate_table(np.arange(0, 50, 10), np.arange(1990, 1997), rates)
    for layout in ("wide", "long"):
        path = tmp_path / f"t_{layout}.csv"
        write_rates_csv(table, path, layout)
        assert read_rates_csv(path, layout).equals(table)


@pytest.mark.parametrize(
    "text, layout, match",
    [
        ("Year,2000,2001\n0,1,2\n", "wide", "header"),
        ("Age,2000,2001,2002,2003\n0,1,x,2,3\n1,1,1,1,1\n", "wide", "row 2, column 3"),
        ("Age,2000,2001,2002,2003\n0,1,1,1,1\n0,1,1,1,1\n", "wide", "duplicate age"),
        ("Age,2000,2000,2002,2003\n0,1,1,1,1\n1,1,1,1,1\n", "wide", "duplicate year"),
        ("Age,2000,2001,2002,2003\n0,1,1,1\n", "wide", "row 2 has 4 cells"),
        ("Year,Age,Value\n2000,0,1\n", "long", "Year,Age,Rate"),
        ("Year,Age,Rate\n2000,0,1\n2000,0,2\n", "long", "duplicate"),
        ("Age,2000,2001,2002,2003\n0,1,1,-1,1\n1,1,1,1,1\n", "wide", "negative"),
        ("Age,2000,2001\n0,1,1\n1,1,1\n", "wide", "4 years"),
    ],
)
def test_malformed_files(tmp_path, text, layout, match):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(DataError, match=match):
        read_rates_csv(path, layout)


def test_open_age_and_empty_cells(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("Age,1990,1991,1992,1993\n0,1,2,3,4\n110+,1,,3,4\n")
    t = read_rates_csv(path)
    np.testing.assert_array_equal(t.ages, [0, 110])
    assert t.mask[1, 1]


def test_to_fts_examples():
    t = read_rates_csv(DATA / "wide_3x4.csv")
    fts = to_fts(t)
    np.testing.assert_array_equal(fts.values, t.rates.T)
    np.testing.assert_array_equal(fts.grid, [0, 1, 2])
    assert fts.label(2) == 2002
    tens = make_rate_table([0, 1], [1, 2, 3, 4], np.full((2, 4), 10.0))
    np.testing.assert_array_equal(to_fts(tens, "log10").values, np.ones((4, 2)))


def test_interior_mask_is_interpolated():
    fts = to_fts(read_rates_csv(DATA / "masked_3x4.csv"), max_masked=0.1)
    assert fts.values[1, 1] == pytest.approx((0.0004 + 0.00035) / 2, rel=1e-14)


def test_interpolation_uses_year_spacing():
    rates = np.array([[1.0, np.nan, np.nan, 4.0, 5.0] * 2, [1.0] * 10])
    t = make_rate_table([0, 1], np.arange(2000, 2010), rates)
    filled = to_fts(t, max_masked=0.25).values[:, 0]
    np.testing.assert_allclose(filled[:5], [1, 2, 3, 4, 5])


def test_too_many_masked_cells():
    with pytest.raises(DataError, match="masked"):
        to_fts(read_rates_csv(DATA / "masked_3x4.csv"), max_masked=0.05)
    rates = np.ones((2, 20))
    rates[1] = np.nan
    with pytest.raises(DataError):
        to_fts(make_rate_table([0, 1], np.arange(20), rates), max_masked=0.6)
