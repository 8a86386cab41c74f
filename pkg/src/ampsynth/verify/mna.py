"""Small-signal AC analysis by modified nodal analysis."""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from ..devices import BjtParams, OpAmpModel
from ..netlist.circuit import GROUND, Circuit, Element
from .linalg import SingularMatrixError, lu_factor, lu_solve

__all__ = [
    "AcResult",
    "DegenerateCircuitError",
    "ModelError",
    "SmallSignalCircuit",
    "solve_ac",
    "solve_nodes",
    "small_signal_of",
    "sweep",
    "sweep_csv",
]

RESIDUAL_LIMIT = 1e-9


class ModelError(ValueError):
    pass


class DegenerateCircuitError(ArithmeticError):
    def __init__(self, detail: str = "") -> None:
        msg = "floating node or degenerate circuit"
        super().__init__(f"{msg} ({detail})" if detail else msg)


@dataclass(frozen=True)
class AcResult:
    frequency: float
    gain: complex

    @property
    def magnitude(self) -> float:
        return abs(self.gain)

    @property
    def phase(self) -> float:
        return math.degrees(cmath.phase(self.gain))


@dataclass(frozen=True, eq=False)
class SmallSignalCircuit:
    """Linear network: branches keyed by node name, ground is ``"0"``.

    The transfer function reported by :func:`solve_ac` is
    ``V(output) / (V(input_pos) - V(input_neg))``.
    """

    conductances: tuple[tuple[str, str, float], ...] = ()
    capacitances: tuple[tuple[str, str, float], ...] = ()
    vccs: tuple[tuple[str, str, str, str, float], ...] = ()
    vcvs: tuple[tuple[str, str, str, str, float], ...] = ()
    sources: tuple[tuple[str, str, str, complex], ...] = ()  # label, n+, n-, excitation
    input_pos: str = "in"
    input_neg: str = GROUND
    output: str = "out"
    extra_nodes: tuple[str, ...] = field(default=())

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for a, b, _ in self.conductances + self.capacitances:
            seen.update(dict.fromkeys((a, b)))
        for t in self.vccs + self.vcvs:
            seen.update(dict.fromkeys(t[:4]))
        for _, a, b, _ in self.sources:
            seen.update(dict.fromkeys((a, b)))
        seen.update(dict.fromkeys(self.extra_nodes))
        seen.pop(GROUND, None)
        return tuple(seen)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @property
    def size(self) -> int:
        return len(self.nodes) + len(self.sources) + len(self.vcvs)

    def with_excitation(self, excitation: dict[str, complex]) -> SmallSignalCircuit:
        unknown = set(excitation) - {s[0] for s in self.sources}
        if unknown:
            raise KeyError(f"no such sources: {sorted(unknown)}")
        srcs = tuple((lab, a, b, complex(excitation.get(lab, e))) for lab, a, b, e in self.sources)
        return replace(self, sources=srcs)

    @cached_property
    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(G, C, rhs) with the system at angular frequency w being (G + jwC) x = rhs."""
        n = self.size
        g = np.zeros((n, n))
        c = np.zeros((n, n))
        rhs = np.zeros(n, dtype=complex)
        ix = self.index

        def stamp2(m, a, b, y):
            i, j = ix.get(a), ix.get(b)
            if i is not None:
                m[i, i] += y
            if j is not None:
                m[j, j] += y
            if i is not None and j is not None:
                m[i, j] -= y
                m[j, i] -= y

        for a, b, val in self.conductances:
            stamp2(g, a, b, val)
        for a, b, val in self.capacitances:
            stamp2(c, a, b, val)
        for p, q, cp, cn, gm in self.vccs:
            # current gm*V(cp,cn) leaves node p and enters node q
            for row, sgn in ((p, 1.0), (q, -1.0)):
                r = ix.get(row)
                if r is None:
                    continue
                if cp in ix:
                    g[r, ix[cp]] += sgn * gm
                if cn in ix:
                    g[r, ix[cn]] -= sgn * gm

        k = len(self.nodes)
        for lab, p, q, exc in self.sources:
            for node, sgn in ((p, 1.0), (q, -1.0)):
                if node in ix:
                    g[ix[node], k] += sgn
                    g[k, ix[node]] += sgn
            rhs[k] = exc
            k += 1
        for p, q, cp, cn, gain in self.vcvs:
            for node, sgn in ((p, 1.0), (q, -1.0)):
                if node in ix:
                    g[ix[node], k] += sgn
                    g[k, ix[node]] += sgn
            if cp in ix:
                g[k, ix[cp]] -= gain
            if cn in ix:
                g[k, ix[cn]] += gain
            k += 1
        return g, c, rhs

    def voltage(self, x: np.ndarray, node: str) -> complex:
        return 0j if node == GROUND else complex(x[self.index[node]])


def _flatten(circuit: Circuit, opamp: OpAmpModel | None) -> list[Element]:
    """Expand subcircuit instances into primitive elements.

    An instance of an undefined 5-pin subcircuit (inp inn vdd vss out) is taken
    to be an ideal op-amp when ``opamp`` is given.
    """
    subckts = circuit.subckts()
    out: list[Element] = []
    for e in circuit.elements:
        if e.kind != "X":
            out.append(e)
            continue
        sub = subckts.get(e.model.lower())
        if sub is None:
            if opamp is None or len(e.nodes) != 5:
                raise ModelError(f"{e.label}: no definition for subcircuit {e.model}")
            inp, inn, _, _, o = e.nodes
            out.append(Element(f"E1.{e.label}", (o, GROUND, inp, inn), value=opamp.open_loop_gain))
            continue
        pin_map = dict(zip(sub.pins, e.nodes))

        def local(node: str, _m=pin_map, _p=e.label) -> str:
            if node == GROUND:
                return GROUND
            return _m.get(node, f"{_p}.{node}")

        for inner in sub.elements:
            out.append(replace(inner, label=f"{inner.label}.{e.label}",
                               nodes=tuple(local(n) for n in inner.nodes)))
    return out


def small_signal_of(
    circuit: Circuit, params: BjtParams, opamp: OpAmpModel | None = None
) -> SmallSignalCircuit:
    """Linearize ``circuit``: DC sources shorted, BJTs replaced by their
    h-parameter model, op-amp instances expanded into their VCVS body.

    The BJT model is h_ie (base-emitter), a VCCS of h_fe/h_ie from the
    base-emitter voltage into the collector, and h_oe (collector-emitter);
    the reverse-transfer term h_re is not modeled.
    """
    conductances, capacitances, vccs, vcvs, sources = [], [], [], [], []
    for e in _flatten(circuit, opamp):
        k = e.kind
        if k == "R":
            conductances.append((e.nodes[0], e.nodes[1], 1.0 / e.value))
        elif k == "C":
            capacitances.append((e.nodes[0], e.nodes[1], e.value))
        elif k == "V":
            sources.append((e.label, e.nodes[0], e.nodes[1], e.source.small_signal))
        elif k == "E":
            vcvs.append((*e.nodes, e.value))
        elif k == "G":
            vccs.append((*e.nodes, e.value))
        elif k == "Q":
            c, b, em = e.nodes
            conductances.append((b, em, 1.0 / params.h_ie))
            vccs.append((c, em, b, em, params.h_fe_typ / params.h_ie))
            conductances.append((c, em, params.h_oe))
        else:
            raise ModelError(f"{e.label}: unsupported element kind {k!r}")

    nodes = circuit.nodes
    if "out" not in nodes:
        raise ModelError("circuit has no 'out' node")
    if {"in1", "in2"} <= nodes:
        inp, inn = "in2", "in1"
    elif "in" in nodes:
        inp, inn = "in", GROUND
    else:
        raise ModelError("circuit has no 'in' node (or 'in1'/'in2' pair)")
    return SmallSignalCircuit(
        conductances=tuple(conductances),
        capacitances=tuple(capacitances),
        vccs=tuple(vccs),
        vcvs=tuple(vcvs),
        sources=tuple(sources),
        input_pos=inp,
        input_neg=inn,
        output="out",
    )


def _solve(ssc: SmallSignalCircuit, f: float, rhs: np.ndarray | None = None) -> np.ndarray:
    if not (f > 0 and math.isfinite(f)):
        raise ValueError(f"frequency must be positive, got {f!r}")
    g, c, b = ssc.matrices
    if rhs is not None:
        b = rhs
    a = g + 2j * math.pi * f * c
    try:
        x = lu_solve(lu_factor(a), b)
    except SingularMatrixError as exc:
        raise DegenerateCircuitError(str(exc)) from None
    bnorm = np.linalg.norm(b)
    if not np.all(np.isfinite(x)):
        raise DegenerateCircuitError("non-finite solution")
    if bnorm > 0 and np.linalg.norm(a @ x - b) / bnorm > RESIDUAL_LIMIT:
        raise DegenerateCircuitError("residual above limit")
    return x


def solve_ac(ssc: SmallSignalCircuit, f: float) -> AcResult:
    x = _solve(ssc, f)
    v_in = ssc.voltage(x, ssc.input_pos) - ssc.voltage(x, ssc.input_neg)
    if v_in == 0:
        raise DegenerateCircuitError("zero input excitation")
    return AcResult(f, ssc.voltage(x, ssc.output) / v_in)


def solve_nodes(ssc: SmallSignalCircuit, f: float, injections: dict[str, complex] | None = None
                ) -> dict[str, complex]:
    """Node voltages at ``f``; ``injections`` adds currents (A) flowing into nodes."""
    _, _, b = ssc.matrices
    b = b.copy()
    for node, cur in (injections or {}).items():
        b[ssc.index[node]] += cur
    x = _solve(ssc, f, b)
    return {n: complex(x[i]) for n, i in ssc.index.items()}


def sweep(ssc: SmallSignalCircuit, f_start: float, f_stop: float, points: int) -> list[AcResult]:
    """Log-spaced sweep, both endpoints included."""
    if not 0 < f_start < f_stop:
        raise ValueError("need 0 < f_start < f_stop")
    if points < 2:
        raise ValueError("need at least 2 points")
    return [solve_ac(ssc, float(f)) for f in np.geomspace(f_start, f_stop, points)]


def sweep_csv(results: list[AcResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frequency_hz", "magnitude", "phase_deg"])
    for r in results:
        w.writerow([repr(r.frequency), repr(r.magnitude), repr(r.phase)])
    return buf.getvalue()
