"""Turn a designed :class:`ComponentSet` into a circuit graph.

Node names are fixed per topology: the signal enters at ``in`` (``in1``/``in2``
for the difference amplifier) and leaves at ``out``; the verifier relies on
this.
"""

from __future__ import annotations

import re

from ..design import ComponentSet
from ..devices import BjtParams, OpAmpModel
from .circuit import Ac, Circuit, CircuitError, Element, Model, Source, Subckt, Tran

OPAMP_SUBCKT = "opamp_ideal"
OPAMP_PINS = ("inp", "inn", "vdd", "vss", "out")
STIMULUS_FREQ = 1e3
OPAMP_RAIL = 15.0
# Load placed on ``out`` when the user gave none, so the node is not left dangling.
PROBE_LOAD = 1e6


class BuildError(CircuitError):
    pass


def _model_name(p: BjtParams | None) -> str:
    if p is None:
        return "QNPN"
    return "Q" + (re.sub(r"\W", "", p.name).upper() or "NPN")


def _stimulus(amplitude: float) -> Source:
    return Source(ac=1.0, sine=(0.0, amplitude, STIMULUS_FREQ))


def _analyses() -> list:
    return [Tran(10e-6, 5 / STIMULUS_FREQ), Ac("dec", 50, 1.0, 1e6)]


class _Builder:
    def __init__(self, cs: ComponentSet, which: str) -> None:
        self.values = cs.values(which)
        self.elements: list[Element] = []
        self.which = which

    def v(self, label: str) -> float:
        try:
            val = self.values[label]
        except KeyError:
            raise BuildError(f"component set is missing {label}") from None
        if val is None:
            raise BuildError(f"{label} has no {self.which} value")
        return val

    def add(self, label: str, *nodes: str, value_of: str | None = None, value: float | None = None,
            **kw) -> None:
        if value_of is not None:
            value = self.v(value_of)
        self.elements.append(Element(label, tuple(nodes), value=value, **kw))


def _ce_stage(b: _Builder, suffix: str, top: str, bottom: str, base: str, col: str, emit_: str,
              model: str, bypass: str | None) -> None:
    b.add(top, "vcc", base, value_of=top)
    b.add(bottom, base, "0", value_of=bottom)
    b.add("RC" + suffix, "vcc", col, value_of="RC" + suffix)
    b.add("RE" + suffix, emit_, "0", value_of="RE" + suffix)
    if bypass is not None:
        b.add(bypass, emit_, "0", value_of=bypass)
    b.add("Q" + (suffix or "1"), col, base, emit_, model=model)


def build_circuit(
    cs: ComponentSet,
    stimulus: Source | None = None,
    params: BjtParams | None = None,
    opamp: OpAmpModel | None = None,
    which: str = "quantized",
) -> Circuit:
    """Assemble the schematic for ``cs``.

    ``which`` selects the raw, nominal or quantized component values.
    """
    b = _Builder(cs, which)
    opamp = opamp or OpAmpModel()
    directives: list = []
    topo = cs.topology
    amp = cs.stimulus_amplitude

    if topo in ("single-stage", "two-stage", "power"):
        model = _model_name(params)
        beta = params.h_fe_typ if params is not None else 100.0
        directives.append(Model(model, "NPN", (("BF", beta),)))
        src = stimulus or _stimulus(amp)
        if "RS" in cs:
            b.elements.append(Element("V1", ("src", "0"), source=src))
            b.add("RS", "src", "in", value_of="RS")
        else:
            b.elements.append(Element("V1", ("in", "0"), source=src))
        b.elements.append(Element("VCC", ("vcc", "0"), source=Source(dc=b.v("VCC"))))

    if topo == "single-stage":
        _ce_stage(b, "", "R1", "R2", "b", "c", "e", model, "CE")
        b.add("CB", "in", "b", value_of="CB")
        b.add("CC", "c", "out", value_of="CC")
        b.add("RL", "out", "0", value=b.v("RL") if "RL" in cs else PROBE_LOAD)
    elif topo == "two-stage":
        _ce_stage(b, "1", "R1", "R2", "b1", "c1", "e1", model, "CE1")
        _ce_stage(b, "2", "R3", "R4", "b2", "c2", "e2", model, "CE2")
        b.add("CB1", "in", "b1", value_of="CB1")
        b.add("CB2", "c1", "b2", value_of="CB2")
        b.add("C0", "c2", "out", value_of="C0")
        b.add("RL", "out", "0", value=b.v("RL") if "RL" in cs else PROBE_LOAD)
    elif topo == "power":
        n = b.v("N")
        r_l = b.v("RL")
        b.add("R1", "vcc", "b", value_of="R1")
        b.add("R2", "b", "0", value_of="R2")
        b.add("RE", "e", "0", value_of="RE")
        b.add("CB", "in", "b", value_of="CB")
        b.add("Q1", "c", "b", "e", model=model)
        # ideal transformer, primary vcc->c, secondary out->0:
        # v_sec = v_pri/n and i_pri = i_sec/n with i_sec = v_sec/R_L
        b.add("ET1", "out", "0", "vcc", "c", value=1 / n)
        b.add("GT1", "vcc", "c", "out", "0", value=1 / (n * r_l))
        b.add("RL", "out", "0", value=r_l)
    elif topo in ("opamp", "diff"):
        directives.append(
            Subckt(OPAMP_SUBCKT, OPAMP_PINS, (Element("E1", ("out", "0", "inp", "inn"), value=opamp.open_loop_gain),))
        )
        b.elements.append(Element("VDD", ("vdd", "0"), source=Source(dc=OPAMP_RAIL)))
        b.elements.append(Element("VSS", ("vss", "0"), source=Source(dc=-OPAMP_RAIL)))
        _opamp_network(b, cs, amp, stimulus)
    else:
        raise BuildError(f"unknown topology {topo!r}")

    directives += _analyses()
    title = f"ampsynth {topo}" + (f" {cs.config}" if cs.config and cs.config != topo else "")
    if cs.target_gain is not None:
        title += f" gain={cs.target_gain:g}"
    circuit = Circuit(title, tuple(b.elements), tuple(directives))
    circuit.validate()
    return circuit


def _opamp_network(b: _Builder, cs: ComponentSet, amp: float, stimulus: Source | None) -> None:
    config = cs.config

    def u(inp: str, inn: str) -> None:
        b.add("XU1", inp, inn, "vdd", "vss", "out", model=OPAMP_SUBCKT)

    if config == "diff":
        neg = Source(ac=0.5, ac_phase=180.0, sine=(0.0, -amp, STIMULUS_FREQ))
        pos = Source(ac=0.5, sine=(0.0, amp, STIMULUS_FREQ))
        b.elements.append(Element("V1", ("in1", "0"), source=neg))
        b.elements.append(Element("V2", ("in2", "0"), source=pos))
        b.add("R1", "in1", "inn", value_of="R1")
        b.add("R2", "inn", "out", value_of="R2")
        b.add("R3", "in2", "inp", value_of="R3")
        b.add("R4", "inp", "0", value_of="R4")
        u("inp", "inn")
        return

    b.elements.append(Element("V1", ("in", "0"), source=stimulus or _stimulus(amp)))
    if config == "follower":
        u("in", "out")
    elif config == "non-inverting":
        b.add("R1", "inn", "0", value_of="R1")
        b.add("R2", "inn", "out", value_of="R2")
        u("in", "inn")
    elif config == "inverting":
        b.add("R1", "in", "inn", value_of="R1")
        b.add("R2", "inn", "out", value_of="R2")
        u("0", "inn")
    elif config == "inverting-t":
        b.add("R1", "in", "inn", value_of="R1")
        b.add("R2", "inn", "x", value_of="R2")
        b.add("R3", "x", "0", value_of="R3")
        b.add("R4", "x", "out", value_of="R4")
        u("0", "inn")
    else:
        raise BuildError(f"unknown op-amp configuration {config!r}")
