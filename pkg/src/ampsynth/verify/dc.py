"""DC operating point of voltage-divider biased CE stages (base current neglected)."""

from __future__ import annotations

from dataclasses import dataclass

from ..devices import BjtParams
from ..netlist.circuit import GROUND, Circuit, Element
from .mna import ModelError


@dataclass(frozen=True)
class DcOperatingPoint:
    device: str
    v_cc: float
    v_b: float
    v_e: float
    v_ce: float
    i_c: float
    diagnostics: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def _supply_nodes(c: Circuit) -> dict[str, float]:
    out = {}
    for e in c.by_kind("V"):
        if e.source.dc is None:
            continue
        p, n = e.nodes
        if n == GROUND:
            out[p] = e.source.dc
        elif p == GROUND:
            out[n] = -e.source.dc
    return out


def _resistor_between(rs: list[Element], a: str, b: str) -> Element | None:
    for r in rs:
        if set(r.nodes) == {a, b}:
            return r
    return None


def solve_dc(c: Circuit, p: BjtParams, device: str | None = None) -> DcOperatingPoint:
    """Bias point of one BJT from its divider, emitter and collector resistors."""
    bjts = c.by_kind("Q")
    if not bjts:
        raise ModelError("no BJT in circuit")
    q = bjts[0] if device is None else c.element(device)
    col, base, emi = q.nodes
    supplies = _supply_nodes(c)
    rs = c.by_kind("R")

    top = next(((r, n) for n, v in supplies.items() if v > 0
                for r in [_resistor_between(rs, base, n)] if r is not None), None)
    bottom = _resistor_between(rs, base, GROUND)
    r_e = _resistor_between(rs, emi, GROUND)
    if top is None or bottom is None or r_e is None:
        raise ModelError(f"{q.label}: not a divider-biased common-emitter stage")
    r_top, rail = top
    v_cc = supplies[rail]
    r_c = _resistor_between(rs, col, rail)
    r_c_val = r_c.value if r_c is not None else 0.0

    v_b = v_cc * bottom.value / (r_top.value + bottom.value)
    v_e = v_b - p.v_be_on
    diags = []
    if v_e <= 0:
        return DcOperatingPoint(q.label, v_cc, v_b, 0.0, v_cc, 0.0, ("transistor cut off",))
    i_c = v_e / r_e.value
    v_ce = v_cc - i_c * (r_c_val + r_e.value)
    if v_ce <= p.v_ce_sat:
        diags.append("saturation")
    return DcOperatingPoint(q.label, v_cc, v_b, v_e, v_ce, i_c, tuple(diags))


def solve_dc_all(c: Circuit, p: BjtParams) -> list[DcOperatingPoint]:
    return [solve_dc(c, p, q.label) for q in c.by_kind("Q")]
