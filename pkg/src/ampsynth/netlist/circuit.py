"""Node/element graph shared by the netlist code and the verifier."""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field

GROUND = "0"

# Fixed terminal counts; subcircuit instances take their pin count from the definition.
ARITY = {"R": 2, "C": 2, "V": 2, "Q": 3, "E": 4, "G": 4}
KINDS = frozenset(ARITY) | {"X"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Source:
    """Independent voltage source value: any mix of DC level, AC phasor and sine."""

    dc: float | None = None
    ac: float | None = None
    ac_phase: float = 0.0
    sine: tuple[float, float, float] | None = None  # offset, amplitude, frequency

    @property
    def small_signal(self) -> complex:
        """Excitation seen by the AC analysis (DC levels are shorted)."""
        if self.ac is not None:
            return cmath.rect(self.ac, math.radians(self.ac_phase))
        if self.sine is not None:
            return complex(self.sine[1])
        return 0j


@dataclass(frozen=True)
class Element:
    label: str
    nodes: tuple[str, ...]
    value: float | None = None
    model: str | None = None
    source: Source | None = None

    @property
    def kind(self) -> str:
        return self.label[0].upper()


@dataclass(frozen=True)
class Model:
    name: str
    type: str
    params: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class Subckt:
    name: str
    pins: tuple[str, ...]
    elements: tuple[Element, ...]


@dataclass(frozen=True)
class Tran:
    step: float
    stop: float


@dataclass(frozen=True)
class Ac:
    sweep: str
    points: int
    f_start: float
    f_stop: float


Directive = Model | Subckt | Tran | Ac


@dataclass(frozen=True)
class Circuit:
    title: str
    elements: tuple[Element, ...]
    directives: tuple[Directive, ...] = field(default=())

    @property
    def nodes(self) -> set[str]:
        out = {GROUND}
        for e in self.elements:
            out.update(e.nodes)
        return out

    def element(self, label: str) -> Element:
        for e in self.elements:
            if e.label.upper() == label.upper():
                return e
        raise KeyError(label)

    def by_kind(self, kind: str) -> list[Element]:
        return [e for e in self.elements if e.kind == kind]

    def subckts(self) -> dict[str, Subckt]:
        return {d.name.lower(): d for d in self.directives if isinstance(d, Subckt)}

    def models(self) -> dict[str, Model]:
        return {d.name.lower(): d for d in self.directives if isinstance(d, Model)}

    def node_degrees(self) -> Counter:
        deg: Counter = Counter()
        for e in self.elements:
            deg.update(e.nodes)
        return deg

    def validate(self) -> None:
        seen = set()
        subckts = self.subckts()
        models = self.models()
        for e in self.elements:
            _check_element(e, subckts)
            key = e.label.upper()
            if key in seen:
                raise CircuitError(f"duplicate element label {e.label}")
            seen.add(key)
            if e.kind == "Q" and e.model.lower() not in models:
                raise CircuitError(f"{e.label}: undefined model {e.model}")
        for sub in subckts.values():
            inner = set()
            for e in sub.elements:
                if e.kind in ("X", "Q"):
                    raise CircuitError(f"subckt {sub.name}: {e.kind} elements not supported inside")
                _check_element(e, {})
                if e.label.upper() in inner:
                    raise CircuitError(f"subckt {sub.name}: duplicate label {e.label}")
                inner.add(e.label.upper())


def _check_element(e: Element, subckts: dict[str, Subckt]) -> None:
    kind = e.kind
    if kind not in KINDS:
        raise CircuitError(f"{e.label}: unknown element letter {kind!r}")
    if kind == "X":
        sub = subckts.get((e.model or "").lower())
        if sub is None:
            raise CircuitError(f"{e.label}: undefined subcircuit {e.model}")
        arity = len(sub.pins)
    else:
        arity = ARITY[kind]
    if len(e.nodes) != arity:
        raise CircuitError(f"{e.label}: expected {arity} terminals, got {len(e.nodes)}")
    if kind in ("R", "C", "E", "G") and e.value is None:
        raise CircuitError(f"{e.label}: missing value")
    if kind in ("R", "C") and not e.value > 0:
        raise CircuitError(f"{e.label}: value must be positive")
    if kind == "V" and (e.source is None or (e.source.dc, e.source.ac, e.source.sine) == (None,) * 3):
        raise CircuitError(f"{e.label}: source has no DC, AC or SINE value")
    if kind == "Q" and not e.model:
        raise CircuitError(f"{e.label}: missing model name")
