"""Shared design types and the bias-divider solver."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from ..values import Direction, get_series, quantize, quantize_supply


class DesignError(ValueError):
    """Requested amplifier cannot be realized by the closed-form procedure."""


class Qualifier(enum.Enum):
    AT_LEAST = "at-least"
    AT_MOST = "at-most"
    EXACT = "exact"

    @property
    def direction(self) -> Direction:
        return {
            Qualifier.AT_LEAST: Direction.HIGHER,
            Qualifier.AT_MOST: Direction.LOWER,
            Qualifier.EXACT: Direction.NEAREST,
        }[self]


@dataclass(frozen=True)
class GainTarget:
    value: float
    qualifier: Qualifier = Qualifier.EXACT

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value == 0:
            raise DesignError("gain must be a finite non-zero number")


@dataclass(frozen=True)
class Component:
    """One designed part.

    ``raw`` comes from the fully continuous design (nothing rounded anywhere,
    supply included); ``nominal`` is the value the equation gives once every
    upstream part has been fixed to its standard value, and ``quantized`` is
    ``nominal`` snapped in ``direction``.  ``direction`` is None for values the
    user supplied or that are kept exact.
    """

    kind: str
    raw: float | None
    nominal: float
    quantized: float
    direction: Direction | None = None


@dataclass(frozen=True)
class BiasRecord:
    v_ceq: float
    i_cq: float
    v_re: float
    v_cc: float
    r_b: float
    stability_achieved: float
    stage: int = 1
    v_cc_rail: float | None = None
    v_ce_peak: float | None = None
    i_c_peak: float | None = None
    r_l_prime: float | None = None
    p_re: float | None = None


@dataclass(frozen=True)
class ComponentSet:
    topology: str
    components: dict[str, Component]
    config: str | None = None
    bias: tuple[BiasRecord, ...] = ()
    target_gain: float | None = None
    stimulus_amplitude: float = 10e-3
    extras: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __contains__(self, label: str) -> bool:
        return label in self.components

    def quantized(self, label: str) -> float:
        return self.components[label].quantized

    def raw(self, label: str) -> float | None:
        return self.components[label].raw

    def values(self, which: str = "quantized") -> dict[str, float | None]:
        if which not in ("raw", "nominal", "quantized"):
            raise ValueError(f"unknown value set {which!r}")
        return {k: getattr(c, which) for k, c in self.components.items()}


def parallel(*rs: float) -> float:
    return 1.0 / sum(1.0 / r for r in rs)


def stability_factor(h_fe_max: float, r_e: float, r_b: float) -> float:
    return (1 + h_fe_max) / (1 + h_fe_max * r_e / (r_b + r_e))


class Divider(NamedTuple):
    r_b: float
    r1: float
    r2: float
    v_r1: float
    v_r2: float


def solve_bias_divider(
    s_target: float,
    h_fe_max: float,
    r_e: float,
    v_cc: float,
    v_re: float,
    v_be_on: float,
) -> Divider:
    """Size the base divider for a target stability factor.

    R_b is the Thevenin resistance that makes
    ``s = (1 + b)/(1 + b*R_e/(R_b + R_e))`` hold exactly; R_1 (top) and R_2
    (bottom) then split the supply so the base sits at ``v_be_on + v_re``.
    """
    if not 1 < s_target < 1 + h_fe_max:
        raise DesignError(
            f"stability factor out of range: need 1 < s < {1 + h_fe_max:g}, got {s_target:g}"
        )
    if r_e <= 0 or v_cc <= 0:
        raise DesignError("emitter resistor and supply must be positive")
    r_b = r_e * (h_fe_max * s_target / (1 + h_fe_max - s_target) - 1)
    if not (r_b > 0 and math.isfinite(r_b)):
        raise DesignError(f"stability factor {s_target:g} is unattainable with this emitter resistor")
    v_r2 = v_be_on + v_re
    v_r1 = v_cc - v_r2
    if v_r1 <= 0:
        raise DesignError(
            f"supply too low for bias string: V_CC={v_cc:.4g} V <= V_be + V_re = {v_r2:.4g} V"
        )
    # R1/R2 = v_r1/v_r2 and R1*R2/(R1+R2) = r_b
    r1 = r_b * v_cc / v_r2
    r2 = r_b * v_cc / v_r1
    return Divider(r_b, r1, r2, v_r1, v_r2)


# Raw/nominal component bounds; anything outside is not a buildable part.
_BOUNDS = {"R": (1e-3, 1e9), "C": (1e-15, 10.0)}


class Chain:
    """Runs one pass of a design procedure.

    The same procedure body runs twice: once continuous (``build=False``) and
    once with each part snapped as soon as it is chosen (``build=True``), so
    downstream equations see the values that will actually be placed.
    """

    def __init__(self, build: bool, series: str = "E24", cap_series: str = "E6") -> None:
        self.build = build
        self.series = get_series(series)
        self.cap_series = get_series(cap_series)
        self.nominal: dict[str, float | None] = {}
        self.chosen: dict[str, float | None] = {}
        self.directions: dict[str, Direction | None] = {}
        self.kinds: dict[str, str] = {}
        self.notes: list[str] = []

    def _record(self, label: str, kind: str, nominal, chosen, direction) -> None:
        self.kinds[label] = kind
        self.nominal[label] = nominal
        self.chosen[label] = chosen
        self.directions[label] = direction

    def part(self, label: str, value: float, direction: Direction, kind: str = "R") -> float:
        lo, hi = _BOUNDS[kind]
        if not (math.isfinite(value) and lo <= value <= hi):
            raise DesignError(f"{label} = {value:.4g} is outside the buildable range [{lo:g}, {hi:g}]")
        series = self.cap_series if kind == "C" else self.series
        chosen = quantize(value, direction, series) if self.build else value
        self._record(label, kind, value, chosen, direction)
        return chosen

    def fixed(self, label: str, value: float, kind: str) -> float:
        value = float(value)
        self._record(label, kind, value, value, None)
        return value

    def supply(self, label: str, value: float) -> float:
        if not self.build:
            self._record(label, "V", value, value, Direction.HIGHER)
            return value
        rail = quantize_supply(value)
        if not rail.standard:
            self.notes.append(f"{label} = {value:.4g} V exceeds 18 V; non-standard rail kept as computed")
        self._record(label, "V", value, rail.value, Direction.HIGHER)
        return rail.value

    def divider(self, top: str, bottom: str, s: float, h_fe_max: float, r_e: float,
                v_cc: float, v_re: float, v_be_on: float) -> float:
        """Size a base divider, record both legs and return R_top || R_bottom."""
        try:
            d = solve_bias_divider(s, h_fe_max, r_e, v_cc, v_re, v_be_on)
        except DesignError:
            if self.build:
                raise
            # The continuous supply can be below the bias string even though
            # the rounded-up rail is fine; the raw legs are then undefined.
            r_b = r_e * (h_fe_max * s / (1 + h_fe_max - s) - 1)
            self._record(top, "R", None, None, Direction.HIGHER)
            self._record(bottom, "R", None, None, Direction.LOWER)
            return r_b
        r2 = self.part(bottom, d.r2, Direction.LOWER)
        r1 = self.part(top, d.r1, Direction.HIGHER)
        return parallel(r1, r2) if self.build else d.r_b


def merge(raw: Chain, built: Chain) -> dict[str, Component]:
    out = {}
    for label in built.chosen:
        out[label] = Component(
            kind=built.kinds[label],
            raw=raw.chosen.get(label),
            nominal=built.nominal[label],
            quantized=built.chosen[label],
            direction=built.directions[label],
        )
    return out


def cap_for(x: float, f_l: float) -> float:
    """Capacitance whose reactance at ``f_l`` equals ``x``."""
    return 1.0 / (2 * math.pi * f_l * x)
