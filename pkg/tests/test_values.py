from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampsynth.values import (
    SUPPLY_RAILS,
    Direction,
    MagnitudeParseError,
    format_magnitude,
    get_series,
    parse_magnitude,
    quantize,
    quantize_supply,
)

from oracles import TABLES, expanded, scan_quantize

DIRS = {"higher": Direction.HIGHER, "lower": Direction.LOWER, "nearest": Direction.NEAREST}
positive = st.floats(min_value=1e-12, max_value=1e8, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("name", ["E6", "E12", "E24"])
def test_shipped_tables_match_reference(name):
    s = get_series(name)
    assert [float(m) for m in s.members] == list(TABLES[name])


@pytest.mark.parametrize(
    "x, d, expected",
    [(1000, Direction.NEAREST, 1000), (500, Direction.HIGHER, 510), (937, Direction.NEAREST, 910),
     (500, Direction.LOWER, 470), (9.9, Direction.HIGHER, 10), (0.0105, Direction.LOWER, 0.01)],
)
def test_quantize_examples(x, d, expected):
    assert quantize(x, d) == pytest.approx(expected, rel=1e-15)


def test_nearest_tie_goes_up():
    # 1.25k sits exactly halfway between 1.2k and 1.3k
    assert quantize(1250, Direction.NEAREST) == 1300
    assert quantize(1.05, Direction.NEAREST) == 1.1


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_quantize_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        quantize(bad, Direction.NEAREST)


@pytest.mark.parametrize("series", ["E6", "E12", "E24"])
def test_quantize_matches_table_scan(series):
    table = expanded(series)
    rng = random.Random(20240601)
    for _ in range(10_000 if series == "E24" else 2_000):
        x = 10 ** rng.uniform(-13, 9)
        for name, d in DIRS.items():
            assert quantize(x, d, series) == scan_quantize(x, name, table), (x, name)


@given(positive, st.sampled_from(list(DIRS.values())))
def test_idempotent(x, d):
    q = quantize(x, d)
    assert quantize(q, d) == q


@given(positive)
def test_bracketing(x):
    lo, hi = quantize(x, Direction.LOWER), quantize(x, Direction.HIGHER)
    assert lo <= x * (1 + 1e-12) and x <= hi * (1 + 1e-12)
    assert quantize(x, Direction.NEAREST) in (lo, hi)


@given(st.floats(min_value=1.0, max_value=9.999), st.integers(-10, 7), st.sampled_from(list(DIRS.values())))
def test_decade_covariance(m, k, d):
    x = m * 10.0 ** k
    assert quantize(10 * x, d) == pytest.approx(10 * quantize(x, d), rel=1e-12)


@pytest.mark.parametrize("v, rail, standard", [(1.8, 9, True), (12, 12, True), (16.2, 18, True),
                                               (9.0000001, 12, True), (24, 24, False)])
def test_quantize_supply(v, rail, standard):
    r = quantize_supply(v)
    assert r.value == rail and r.standard is standard


def test_supply_rails():
    assert tuple(SUPPLY_RAILS) == (9, 12, 15, 18)
    with pytest.raises(ValueError):
        quantize_supply(0)


@pytest.mark.parametrize(
    "text, value",
    [("10k", 1e4), ("1MEG", 1e6), ("1meg", 1e6), ("1Meg", 1e6), ("1m", 1e-3), ("1M", 1e-3),
     ("4.7uF", 4.7e-6), ("2.2nF", 2.2e-9), ("100pf", 1e-10), ("3f", 3e-15), ("1.5G", 1.5e9),
     ("220", 220.0), ("1e3", 1e3), ("-2.5", -2.5), (".5k", 500.0), ("10kohm", 1e4), ("9V", 9.0),
     ("1k5", None)],
)
def test_parse_magnitude(text, value):
    if value is None:
        with pytest.raises(MagnitudeParseError):
            parse_magnitude(text)
    else:
        assert parse_magnitude(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text, offset", [("", 0), ("abc", 0), ("10x", 2), ("10kq", 3)])
def test_parse_error_offset(text, offset):
    with pytest.raises(MagnitudeParseError) as exc:
        parse_magnitude(text)
    assert exc.value.offset == offset


@pytest.mark.parametrize(
    "x, text",
    [(1e4, "10k"), (4.7e-6, "4.7u"), (220.3, "220.3"), (1e6, "1Meg"), (0.0, "0"), (1.0, "1"),
     (999.96, "1k"), (123456, "123.5k"), (-4700, "-4.7k"), (2.5e-15, "2.5f"), (3e9, "3G")],
)
def test_format_magnitude(x, text):
    assert format_magnitude(x) == text


@given(st.floats(min_value=1e-15, max_value=1e9))
def test_format_parse_roundtrip(x):
    s = format_magnitude(x)
    assert parse_magnitude(s) == pytest.approx(x, rel=1e-3)
    # canonical strings are fixed points
    assert format_magnitude(parse_magnitude(s)) == s


@settings(max_examples=200)
@given(st.sampled_from(["f", "p", "n", "u", "m", "", "k", "Meg", "G"]), st.integers(1, 999))
def test_suffix_scaling(suffix, n):
    mult = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "m": 1e-3, "": 1, "k": 1e3, "Meg": 1e6, "G": 1e9}
    assert parse_magnitude(f"{n}{suffix}") == pytest.approx(n * mult[suffix], rel=1e-15)
