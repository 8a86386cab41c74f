"""Closed-form design engines for the five amplifier topologies."""

from __future__ import annotations

from ..devices import BjtParams, h_composite
from .bjt import (
    DEFAULT_V0_PEAK,
    PowerAmpSpec,
    SingleStageSpec,
    TwoStageSpec,
    ce_gain,
    design_power_amp,
    design_single_stage,
    design_two_stage,
    power_stage_gain,
    solve_collector_resistor,
    two_stage_gain,
)
from .core import (
    BiasRecord,
    Component,
    ComponentSet,
    DesignError,
    Divider,
    GainTarget,
    Qualifier,
    parallel,
    solve_bias_divider,
    stability_factor,
)
from .opamp import DiffAmpSpec, OpAmpSpec, design_diff_amp, design_opamp, opamp_gain

TOPOLOGIES = ("single-stage", "two-stage", "opamp", "diff", "power")

__all__ = [
    "BiasRecord", "Component", "ComponentSet", "DEFAULT_V0_PEAK", "DesignError",
    "DiffAmpSpec", "Divider", "GainTarget", "OpAmpSpec", "PowerAmpSpec", "Qualifier",
    "SingleStageSpec", "TOPOLOGIES", "TwoStageSpec", "analytic_gain", "design_diff_amp",
    "design_opamp", "design_power_amp", "design_single_stage", "design_two_stage",
    "parallel", "solve_bias_divider", "solve_collector_resistor", "stability_factor",
]


def analytic_gain(cs: ComponentSet, p: BjtParams | None = None, which: str = "quantized") -> float:
    """Gain predicted by the topology's closed-form formula.

    CE stages report the magnitude; op-amp stages carry their sign.
    """
    v = cs.values(which)
    if cs.topology in ("opamp", "diff"):
        return opamp_gain(cs.config, v)
    if p is None:
        raise ValueError(f"{cs.topology} gain needs BJT parameters")
    r_l = v.get("RL")
    if cs.topology == "single-stage":
        return ce_gain(p.h_fe_typ, p.h_ie, h_composite(p), v["RC"], r_l)
    if cs.topology == "two-stage":
        if v["R3"] is None or v["R4"] is None:
            r_b2 = cs.bias[1].r_b
        else:
            r_b2 = parallel(v["R3"], v["R4"])
        return two_stage_gain(p, v["RC1"], v["RC2"], r_b2, r_l)
    if cs.topology == "power":
        return power_stage_gain(p, v["RE"], v["N"], v["RL"])
    raise ValueError(f"unknown topology {cs.topology!r}")
