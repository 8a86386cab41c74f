"""Op-amp feedback networks: non-inverting, inverting (T-network) and difference."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..values import Direction
from .core import Chain, ComponentSet, DesignError, GainTarget, merge

DEFAULT_R_BASE = 10e3


@dataclass(frozen=True)
class OpAmpSpec:
    """Signed gain: positive selects non-inverting, negative inverting.

    ``r_base`` is the largest resistor the designer is willing to use.
    """

    gain: GainTarget
    r_base: float = DEFAULT_R_BASE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r_base) and self.r_base > 0):
            raise DesignError("r_base must be > 0")


@dataclass(frozen=True)
class DiffAmpSpec:
    a_d: float
    r_base: float = DEFAULT_R_BASE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a_d) and self.a_d > 0):
            raise DesignError("differential gain must be > 0")
        if not (math.isfinite(self.r_base) and self.r_base > 0):
            raise DesignError("r_base must be > 0")


def opamp_config(gain: float) -> str:
    if gain == 1:
        return "follower"
    if gain > 1:
        return "non-inverting"
    if gain <= -1:
        return "inverting-t" if -gain > 2 else "inverting"
    raise DesignError(f"attenuator not supported: |gain| = {abs(gain):g} < 1")


def opamp_gain(config: str, r: dict[str, float]) -> float:
    """Closed-loop gain of an ideal op-amp stage."""
    if config == "follower":
        return 1.0
    if config == "non-inverting":
        return 1 + r["R2"] / r["R1"]
    if config == "inverting":
        return -r["R2"] / r["R1"]
    if config == "inverting-t":
        return -(r["R2"] / r["R1"]) * (1 + r["R4"] / r["R2"] + r["R4"] / r["R3"])
    if config == "diff":
        return r["R2"] / r["R1"]
    raise ValueError(f"unknown op-amp configuration {config!r}")


def design_opamp(spec: OpAmpSpec, series: str = "E24") -> ComponentSet:
    a = spec.gain.value
    config = opamp_config(a)
    rb = spec.r_base
    raw, built = Chain(False, series), Chain(True, series)
    notes = []
    for ch in (raw, built):
        if config == "non-inverting":
            r1 = ch.part("R1", rb / 10, Direction.NEAREST)
            ch.part("R2", (a - 1) * r1, Direction.NEAREST)
        elif config == "inverting":
            r1 = ch.part("R1", rb, Direction.NEAREST)
            ch.part("R2", -a * r1, Direction.NEAREST)
        elif config == "inverting-t":
            # R1 = R2 = R4 = r_base leaves R3 to set the gain:
            # |A| = 1 + 1 + r_base/R3
            ch.part("R1", rb, Direction.NEAREST)
            ch.part("R2", rb, Direction.NEAREST)
            ch.part("R4", rb, Direction.NEAREST)
            ch.part("R3", rb / (-a - 2), Direction.NEAREST)
    if config == "inverting":
        notes.append("|gain| <= 2: plain two-resistor inverting pair, no T-network")
    elif config == "follower":
        notes.append("unity gain: voltage follower, no resistors")
    return ComponentSet(
        topology="opamp",
        components=merge(raw, built),
        target_gain=a,
        stimulus_amplitude=min(10e-3, 10.0 / abs(a)),
        config=config,
        notes=tuple(notes),
    )


def design_diff_amp(spec: DiffAmpSpec, series: str = "E24") -> ComponentSet:
    """Four-resistor difference amplifier with matched pairs.

    R2 and R4 are quantized together (likewise R1 and R3) so the common-mode
    gain of the ideal circuit stays exactly zero after rounding.
    """
    raw, built = Chain(False, series), Chain(True, series)
    for ch in (raw, built):
        r1 = ch.part("R1", spec.r_base, Direction.NEAREST)
        r2 = ch.part("R2", spec.a_d * spec.r_base, Direction.NEAREST)
        ch.fixed("R3", r1, "R")
        ch.fixed("R4", r2, "R")
    comps = merge(raw, built)
    # the matched legs inherit their partner's rounding rule
    comps["R3"] = comps["R1"]
    comps["R4"] = comps["R2"]
    comps = {k: comps[k] for k in ("R1", "R2", "R3", "R4")}
    return ComponentSet(
        topology="diff",
        components=comps,
        target_gain=spec.a_d,
        stimulus_amplitude=min(5e-3, 5.0 / spec.a_d),
        config="diff",
    )

