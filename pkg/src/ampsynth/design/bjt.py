"""Common-emitter BJT design engines, from one stage up to the transformer-coupled power stage."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..devices import BjtParams, h_composite
from ..values import Direction
from .core import (
    BiasRecord,
    Chain,
    ComponentSet,
    DesignError,
    GainTarget,
    cap_for,
    merge,
    parallel,
    stability_factor,
)

# Output swing assumed when the user gives none: 20 mV pk-pk in at a gain of 20.
DEFAULT_V0_PEAK = 0.2


def _positive(name: str, value: float | None, optional: bool = True) -> None:
    if value is None:
        if not optional:
            raise DesignError(f"{name} is required")
        return
    if not (math.isfinite(value) and value > 0):
        raise DesignError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class SingleStageSpec:
    gain: GainTarget
    v0_peak: float | None = None
    v_cc: float | None = None
    r_l: float | None = None
    r_s: float = 0.0
    f_l: float = 20.0
    stability: float = 8.0

    def __post_init__(self) -> None:
        if self.gain.value <= 0:
            raise DesignError("CE gain must be a positive magnitude")
        for name in ("v0_peak", "v_cc", "r_l"):
            _positive(name, getattr(self, name))
        _positive("f_l", self.f_l, optional=False)
        if self.r_s < 0:
            raise DesignError("r_s must be >= 0")


@dataclass(frozen=True)
class TwoStageSpec(SingleStageSpec):
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.gain.value <= 1:
            raise DesignError("two-stage overall gain must exceed 1")


@dataclass(frozen=True)
class PowerAmpSpec:
    p_load: float
    v_cc: float
    r_l: float
    f_l: float = 50.0
    stability: float = 10.0

    def __post_init__(self) -> None:
        for name in ("p_load", "v_cc", "r_l", "f_l", "stability"):
            _positive(name, getattr(self, name), optional=False)


def solve_collector_resistor(
    gain: float, h_fe: float, h_ie: float, h: float, r_l: float | None
) -> float:
    """R_C such that gain = h_fe*(R_C||R_L)/(h_ie + h*R_C).

    With a load the relation is quadratic in R_C; the smaller positive root
    (rising side of the gain curve) is returned.
    """
    if r_l is None:
        denom = h_fe - gain * h
        if denom <= 0:
            raise DesignError(
                f"gain exceeds device capability: {gain:g} >= h_fe/h = {h_fe / h:.4g}"
            )
        return gain * h_ie / denom

    a = gain * h
    b = gain * (h_ie + h * r_l) - h_fe * r_l
    c = gain * h_ie * r_l
    if a == 0:
        roots = [-c / b] if b != 0 else []
    else:
        disc = b * b - 4 * a * c
        if disc < 0:
            roots = []
        else:
            q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
            roots = [q / a, c / q] if q != 0 else []
    roots = [r for r in roots if r > 0 and math.isfinite(r)]
    if not roots:
        raise DesignError(f"gain exceeds device capability: {gain:g} is unreachable with R_L = {r_l:g}")
    r = min(roots)
    # one Newton step on the cleared-denominator form
    f = a * r * r + b * r + c
    df = 2 * a * r + b
    if df != 0:
        r -= f / df
    return r


def _unwrap_parallel(target: float, other: float | None, stage: int) -> float:
    """R such that R || other == target."""
    if other is None:
        return target
    if other <= target:
        raise DesignError(
            f"stage {stage}: gain exceeds device capability "
            f"(needs load {target:.4g} ohm but the rest of the node is {other:.4g} ohm)"
        )
    return 1.0 / (1.0 / target - 1.0 / other)


def ce_gain(h_fe: float, h_ie: float, h: float, r_c: float, r_l: float | None) -> float:
    """Single-stage CE voltage gain magnitude."""
    r_lp = parallel(r_c, r_l) if r_l is not None else r_c
    return h_fe * r_lp / (h_ie + h * r_c)


# --- single stage ----------------------------------------------------------

def _single_stage(spec: SingleStageSpec, p: BjtParams, ch: Chain) -> BiasRecord:
    h = h_composite(p)
    v0 = spec.v0_peak if spec.v0_peak is not None else DEFAULT_V0_PEAK

    rc = ch.part("RC", solve_collector_resistor(spec.gain.value, p.h_fe_typ, p.h_ie, h, spec.r_l),
                 spec.gain.qualifier.direction)
    r_lp = parallel(rc, spec.r_l) if spec.r_l is not None else rc

    if spec.v_cc is not None:
        v_ceq = spec.v_cc / 2
        v_re = 0.10 * spec.v_cc
    else:
        v_ceq = 1.5 * (v0 + p.v_ce_sat)
        v_re = 1.0
    i_cq = v0 / r_lp + p.i_c_min
    re = ch.part("RE", v_re / i_cq, Direction.LOWER)

    if spec.v_cc is not None:
        v_cc = ch.fixed("VCC", spec.v_cc, "V")
        v_cc_calc = spec.v_cc
    else:
        v_cc_calc = v_ceq + i_cq * (rc + re)
        v_cc = ch.supply("VCC", v_cc_calc)

    r_b = ch.divider("R1", "R2", spec.stability, p.h_fe_max, re, v_cc, v_re, p.v_be_on)
    if spec.r_l is not None:
        ch.fixed("RL", spec.r_l, "R")
    if spec.r_s > 0:
        ch.fixed("RS", spec.r_s, "R")

    ch.part("CE", cap_for(re / 10, spec.f_l), Direction.HIGHER, "C")
    ch.part("CB", cap_for(spec.r_s + parallel(r_b, p.h_ie), spec.f_l), Direction.HIGHER, "C")
    r_next = spec.r_l if spec.r_l is not None else parallel(r_b, p.h_ie)
    ch.part("CC", cap_for(rc + r_next, spec.f_l), Direction.HIGHER, "C")

    return BiasRecord(
        v_ceq=v_ceq, i_cq=i_cq, v_re=v_re, v_cc=v_cc_calc, r_b=r_b,
        stability_achieved=stability_factor(p.h_fe_max, re, r_b), v_cc_rail=v_cc,
    )


def design_single_stage(
    spec: SingleStageSpec, p: BjtParams, series: str = "E24", cap_series: str = "E6"
) -> ComponentSet:
    built = Chain(True, series, cap_series)
    b_bias = _single_stage(spec, p, built)
    raw = Chain(False, series, cap_series)
    r_bias = _single_stage(spec, p, raw)
    bias = _combine(r_bias, b_bias)
    v0 = spec.v0_peak if spec.v0_peak is not None else DEFAULT_V0_PEAK
    return ComponentSet(
        topology="single-stage",
        components=merge(raw, built),
        bias=(bias,),
        target_gain=spec.gain.value,
        stimulus_amplitude=v0 / spec.gain.value,
        notes=tuple(built.notes + _raw_notes(raw)),
    )


def _combine(raw: BiasRecord, built: BiasRecord) -> BiasRecord:
    """Operating-point targets from the continuous design, achieved stability
    and supply rail from the built one."""
    return BiasRecord(
        v_ceq=raw.v_ceq, i_cq=raw.i_cq, v_re=raw.v_re, v_cc=raw.v_cc, r_b=raw.r_b,
        stability_achieved=built.stability_achieved, stage=raw.stage,
        v_cc_rail=built.v_cc_rail, v_ce_peak=raw.v_ce_peak, i_c_peak=raw.i_c_peak,
        r_l_prime=raw.r_l_prime, p_re=raw.p_re,
    )


def _raw_notes(raw: Chain) -> list[str]:
    missing = [k for k, v in raw.chosen.items() if v is None]
    if not missing:
        return []
    return [
        f"continuous supply is below the bias string; raw {', '.join(missing)} "
        "are undefined and were sized only on the standard rail"
    ]


# --- two stage -------------------------------------------------------------

def _two_stage(spec: TwoStageSpec, p: BjtParams, ch: Chain) -> tuple[BiasRecord, BiasRecord]:
    stage_gain = math.sqrt(spec.gain.value)
    direction = spec.gain.qualifier.direction

    # second stage
    r_lp2 = stage_gain * p.h_ie / p.h_fe_typ
    rc2 = ch.part("RC2", _unwrap_parallel(r_lp2, spec.r_l, 2), direction)
    r_lp2 = parallel(rc2, spec.r_l) if spec.r_l is not None else rc2

    if spec.v_cc is not None:
        if spec.v0_peak is not None:
            v_ceq = 1.5 * (spec.v0_peak + p.v_ce_sat)
        else:
            v_ceq = spec.v_cc / 2
        v_re = 0.10 * spec.v_cc
        v_rc = spec.v_cc - v_ceq - v_re
        if v_rc <= 0:
            raise DesignError(
                f"stage 2: supply too low: V_CC - V_CEQ - V_re = {v_rc:.4g} V"
            )
        i_cq2 = v_rc / rc2
        re2 = ch.part("RE2", v_re / i_cq2, Direction.LOWER)
        v_cc = ch.fixed("VCC", spec.v_cc, "V")
        v_cc_calc = spec.v_cc
    else:
        v0 = spec.v0_peak if spec.v0_peak is not None else DEFAULT_V0_PEAK
        v_ceq = 1.5 * (v0 + p.v_ce_sat)
        v_re = 2.0
        i_cq2 = v0 / r_lp2 + p.i_c_min
        v_rc = i_cq2 * rc2
        re2 = ch.part("RE2", v_re / i_cq2, Direction.LOWER)
        v_cc_calc = v_ceq + i_cq2 * (rc2 + re2)
        v_cc = ch.supply("VCC", v_cc_calc)

    try:
        r_b2 = ch.divider("R3", "R4", spec.stability, p.h_fe_max, re2, v_cc, v_re, p.v_be_on)
    except DesignError as exc:
        raise DesignError(f"stage 2: {exc}") from None

    # first stage, loaded by the second stage's input
    r_lp1 = stage_gain * p.h_ie / p.h_fe_typ
    rc1 = ch.part("RC1", _unwrap_parallel(r_lp1, parallel(r_b2, p.h_ie), 1), direction)
    i_cq1 = v_rc / rc1
    re1 = ch.part("RE1", v_re / i_cq1, Direction.LOWER)
    try:
        r_b1 = ch.divider("R1", "R2", spec.stability, p.h_fe_max, re1, v_cc, v_re, p.v_be_on)
    except DesignError as exc:
        raise DesignError(f"stage 1: {exc}") from None

    if spec.r_l is not None:
        ch.fixed("RL", spec.r_l, "R")
    if spec.r_s > 0:
        ch.fixed("RS", spec.r_s, "R")

    f_l = spec.f_l
    ch.part("CE1", cap_for(re1 / 10, f_l), Direction.HIGHER, "C")
    ch.part("CE2", cap_for(re2 / 10, f_l), Direction.HIGHER, "C")
    ch.part("CB1", cap_for(parallel(r_b1, p.h_ie), f_l), Direction.HIGHER, "C")
    ch.part("CB2", cap_for(rc1 + parallel(r_b2, p.h_ie), f_l), Direction.HIGHER, "C")
    r_next = spec.r_l if spec.r_l is not None else parallel(r_b1, p.h_ie)
    ch.part("C0", cap_for(rc2 + r_next, f_l), Direction.HIGHER, "C")

    stage1 = BiasRecord(
        v_ceq=v_ceq, i_cq=i_cq1, v_re=v_re, v_cc=v_ceq + i_cq1 * (rc1 + re1), r_b=r_b1,
        stability_achieved=stability_factor(p.h_fe_max, re1, r_b1), stage=1, v_cc_rail=v_cc,
    )
    stage2 = BiasRecord(
        v_ceq=v_ceq, i_cq=i_cq2, v_re=v_re, v_cc=v_cc_calc, r_b=r_b2,
        stability_achieved=stability_factor(p.h_fe_max, re2, r_b2), stage=2, v_cc_rail=v_cc,
    )
    return stage1, stage2


def design_two_stage(
    spec: TwoStageSpec, p: BjtParams, series: str = "E24", cap_series: str = "E6"
) -> ComponentSet:
    """Cascade of two CE stages with the overall gain split evenly."""
    built = Chain(True, series, cap_series)
    b1, b2 = _two_stage(spec, p, built)
    raw = Chain(False, series, cap_series)
    r1, r2 = _two_stage(spec, p, raw)
    v0 = spec.v0_peak if spec.v0_peak is not None else DEFAULT_V0_PEAK
    return ComponentSet(
        topology="two-stage",
        components=merge(raw, built),
        bias=(_combine(r1, b1), _combine(r2, b2)),
        target_gain=spec.gain.value,
        stimulus_amplitude=v0 / spec.gain.value,
        extras={"stage_gain": math.sqrt(spec.gain.value)},
        notes=tuple(built.notes + _raw_notes(raw)),
    )


def two_stage_gain(p: BjtParams, rc1: float, rc2: float, r_b2: float, r_l: float | None) -> float:
    a2 = p.h_fe_typ * (parallel(rc2, r_l) if r_l is not None else rc2) / p.h_ie
    a1 = p.h_fe_typ * parallel(rc1, r_b2, p.h_ie) / p.h_ie
    return a1 * a2


# --- class-A power ---------------------------------------------------------

def _power(spec: PowerAmpSpec, p: BjtParams, ch: Chain) -> BiasRecord:
    v_re = spec.v_cc / 10
    v_ceq = spec.v_cc - v_re
    v_ce_peak = v_ceq - p.v_ce_sat
    if v_ce_peak <= 0:
        raise DesignError(
            f"supply too low for requested swing: V_CE,peak = {v_ce_peak:.4g} V"
        )
    i_c_peak = 2 * spec.p_load / v_ce_peak
    i_cq = i_c_peak  # I_C,min taken as zero for the power stage
    re = ch.part("RE", v_re / i_cq, Direction.LOWER)
    p_re = v_re**2 / re

    v_cc = ch.fixed("VCC", spec.v_cc, "V")
    r_b = ch.divider("R1", "R2", spec.stability, p.h_fe_max, re, v_cc, i_cq * re, p.v_be_on)

    r_l_prime = v_ce_peak / i_c_peak
    ch.fixed("N", math.sqrt(r_l_prime / spec.r_l), "ratio")
    ch.fixed("RL", spec.r_l, "R")
    r_in = parallel(r_b, p.h_ie + (1 + p.h_fe_typ) * re)
    ch.part("CB", cap_for(r_in, spec.f_l), Direction.HIGHER, "C")

    return BiasRecord(
        v_ceq=v_ceq, i_cq=i_cq, v_re=v_re, v_cc=spec.v_cc, r_b=r_b,
        stability_achieved=stability_factor(p.h_fe_max, re, r_b), v_cc_rail=v_cc,
        v_ce_peak=v_ce_peak, i_c_peak=i_c_peak, r_l_prime=r_l_prime, p_re=p_re,
    )


def power_stage_gain(p: BjtParams, r_e: float, n: float, r_l: float) -> float:
    """Voltage gain from base source to the transformer secondary."""
    r_reflected = n * n * r_l
    return p.h_fe_typ * r_reflected / (p.h_ie + (1 + p.h_fe_typ) * r_e) / n


def design_power_amp(
    spec: PowerAmpSpec, p: BjtParams, series: str = "E24", cap_series: str = "E6"
) -> ComponentSet:
    """Transformer-coupled class-A stage with an unbypassed emitter resistor."""
    built = Chain(True, series, cap_series)
    b_bias = _power(spec, p, built)
    raw = Chain(False, series, cap_series)
    r_bias = _power(spec, p, raw)
    cs_components = merge(raw, built)
    gain = power_stage_gain(p, cs_components["RE"].quantized, cs_components["N"].quantized, spec.r_l)
    c_e = 1 / (2 * math.pi * spec.f_l * spec.r_l)
    v_in = 0.8 * (r_bias.v_ce_peak / cs_components["N"].quantized) / gain
    return ComponentSet(
        topology="power",
        components=cs_components,
        bias=(_combine(r_bias, b_bias),),
        target_gain=None,
        stimulus_amplitude=v_in,
        extras={"CE_unplaced": c_e, "p_load": spec.p_load},
        notes=tuple(built.notes + _raw_notes(raw))
        + (f"emitter bypass C_e = {c_e:.4g} F computed but not placed; R_e left unbypassed",),
    )
