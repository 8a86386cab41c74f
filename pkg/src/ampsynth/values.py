"""Standard component values and SPICE-style magnitude text.

Component magnitudes are carried as plain floats in SI base units.  This module
owns the two conversions the rest of the package needs: snapping a computed
value onto a preferred-number series, and reading/writing the suffixed numbers
used in netlists (``10k``, ``4.7u``, ``1Meg``).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

__all__ = [
    "Direction",
    "MagnitudeParseError",
    "Rail",
    "SUPPLY_RAILS",
    "Series",
    "format_magnitude",
    "get_series",
    "parse_magnitude",
    "quantize",
    "quantize_supply",
]

SUPPLY_RAILS: tuple[float, ...] = (9.0, 12.0, 15.0, 18.0)

# Relative distance under which a value counts as already sitting on a member.
_SNAP = 1e-12


class Direction(enum.Enum):
    HIGHER = "higher"
    LOWER = "lower"
    NEAREST = "nearest"


@dataclass(frozen=True)
class Series:
    """One preferred-number series: a name plus its per-decade mantissas.

    ``members`` holds the mantissas exactly as written in the data file so that
    scaled values can be built through a decimal string (``"5.1e2"`` is exactly
    510.0, while ``5.1 * 100`` is not).
    """

    name: str
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        vals = [float(m) for m in self.members]
        if not vals or vals[0] != 1.0:
            raise ValueError(f"{self.name}: first member must be 1.0")
        if any(not 1.0 <= v < 10.0 for v in vals):
            raise ValueError(f"{self.name}: members must lie in [1, 10)")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"{self.name}: members must be strictly ascending")

    @property
    def mantissas(self) -> tuple[float, ...]:
        return tuple(float(m) for m in self.members)

    def decade(self, exponent: int) -> list[float]:
        return [float(f"{m}e{exponent}") for m in self.members]

    def contains(self, x: float) -> bool:
        """True if ``x`` is a member scaled by some power of ten."""
        if not (x > 0 and math.isfinite(x)):
            return False
        k = math.floor(math.log10(x))
        return any(_close(v, x) for d in (k - 1, k, k + 1) for v in self.decade(d))


def _load_tables() -> dict[str, Series]:
    text = resources.files("ampsynth").joinpath("data/eseries.txt").read_text()
    tables: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].upper()
            tables[current] = []
        elif current is None:
            raise ValueError("eseries.txt: value before first [series] header")
        else:
            tables[current].append(line)
    return {name: Series(name, tuple(vals)) for name, vals in tables.items()}


@lru_cache(maxsize=None)
def _tables() -> dict[str, Series]:
    return _load_tables()


def get_series(name: str) -> Series:
    try:
        return _tables()[name.upper()]
    except KeyError:
        raise ValueError(f"unknown series {name!r}; have {sorted(_tables())}") from None


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _SNAP * max(abs(a), abs(b))


def quantize(x: float, direction: Direction, series: Series | str = "E24") -> float:
    """Snap ``x`` onto ``series``.

    HIGHER picks the smallest member >= x, LOWER the largest member <= x, and
    NEAREST the member closest in absolute terms, breaking ties upward.
    """
    if isinstance(series, str):
        series = get_series(series)
    if not (math.isfinite(x) and x > 0):
        raise ValueError(f"cannot quantize non-positive or non-finite value {x!r}")

    k = math.floor(math.log10(x))
    candidates = [v for d in (k - 1, k, k + 1) for v in series.decade(d)]
    candidates.append(float(f"1e{k + 2}"))
    for v in candidates:
        if _close(v, x):
            return v

    lo = max(v for v in candidates if v < x)
    hi = min(v for v in candidates if v > x)
    if direction is Direction.HIGHER:
        return hi
    if direction is Direction.LOWER:
        return lo
    d_lo, d_hi = x - lo, hi - x
    if d_hi < d_lo or _close(d_lo, d_hi):
        return hi
    return lo


class Rail(NamedTuple):
    value: float
    standard: bool


def quantize_supply(v: float) -> Rail:
    """Round a supply voltage up to the next lab rail (9, 12, 15 or 18 V).

    Voltages above the highest rail pass through with ``standard=False``.
    """
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"supply voltage must be positive, got {v!r}")
    for rail in SUPPLY_RAILS:
        if v <= rail or _close(v, rail):
            return Rail(rail, True)
    return Rail(v, False)


# --- magnitude text --------------------------------------------------------

_SUFFIXES: dict[str, int] = {
    "f": -15,
    "p": -12,
    "n": -9,
    "u": -6,
    "m": -3,
    "k": 3,
    "meg": 6,
    "g": 9,
}
_UNITS = {"ohm", "ohms", "v", "a", "f", "h", "hz", "s", "w", "db", "ω"}
_FORMAT_SUFFIX = {-15: "f", -12: "p", -9: "n", -6: "u", -3: "m", 0: "", 3: "k", 6: "Meg", 9: "G"}
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class MagnitudeParseError(ValueError):
    def __init__(self, text: str, offset: int, reason: str) -> None:
        super().__init__(f"{reason} at offset {offset} in {text!r}")
        self.text = text
        self.offset = offset
        self.reason = reason


def parse_magnitude(text: str) -> float:
    """Parse ``<number>[suffix][unit]`` into a float.

    Suffixes are case-insensitive; ``m`` is milli and ``meg`` is mega.  A unit
    word after the suffix (``F``, ``V``, ``ohm`` ...) is accepted and ignored.
    """
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    m = _NUMBER.match(s)
    if m is None:
        raise MagnitudeParseError(text, lead, "malformed number")
    number = m.group(0)
    rest = s[m.end():]
    pos = lead + m.end()

    exponent = 0
    low = rest.lower()
    if low.startswith("meg"):
        exponent, rest = 6, rest[3:]
    elif low[:1] in _SUFFIXES:
        exponent, rest = _SUFFIXES[low[:1]], rest[1:]
    unit_pos = pos + (len(s) - m.end() - len(rest))
    if rest and rest.lower() not in _UNITS:
        if exponent == 0:
            raise MagnitudeParseError(text, pos, f"unknown suffix {rest!r}")
        raise MagnitudeParseError(text, unit_pos, f"unknown unit {rest!r}")
    return float(Decimal(number).scaleb(exponent))


def format_magnitude(x: float) -> str:
    """Canonical 4-significant-digit text with the largest fitting suffix."""
    if not math.isfinite(x):
        raise ValueError(f"cannot format {x!r}")
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    d = Decimal(f"{abs(x):.3e}")
    exp3 = min(max((d.adjusted() // 3) * 3, -15), 9)
    mant = d.scaleb(-exp3).normalize()
    body = f"{mant:f}" if abs(mant.adjusted()) < 12 else f"{mant:e}"
    return f"{sign}{body}{_FORMAT_SUFFIX[exp3]}"
