"""Design verification against the target gain and the bias point."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..design import ComponentSet, analytic_gain
from ..devices import BjtParams, OpAmpModel, default_params
from ..netlist import Circuit, build_circuit
from .dc import DcOperatingPoint, solve_dc_all
from .mna import _solve, solve_ac, small_signal_of

MIDBAND_HZ = 1e3
DEFAULT_TOLERANCE = 0.15
TWO_STAGE_TOLERANCE = 0.25


@dataclass
class VerificationReport:
    target_gain: float | None
    tolerance: float
    mna_gain: complex
    analytic_gain: float | None = None
    common_mode_gain: float | None = None
    dc: list[DcOperatingPoint] = field(default_factory=list)
    stability_achieved: list[float] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def mna_magnitude(self) -> float:
        return abs(self.mna_gain)


def _within(value: float, target: float, tol: float) -> bool:
    return abs(abs(value) - abs(target)) <= tol * abs(target)


def check_circuit(
    circuit: Circuit,
    params: BjtParams,
    gain: float | None = None,
    tolerance: float | None = None,
    opamp: OpAmpModel | None = None,
) -> VerificationReport:
    """Check a circuit on its own (e.g. read back from a netlist)."""
    n_bjt = len(circuit.by_kind("Q"))
    if tolerance is None:
        tolerance = TWO_STAGE_TOLERANCE if n_bjt >= 2 else DEFAULT_TOLERANCE
    ssc = small_signal_of(circuit, params, opamp)
    mid = solve_ac(ssc, MIDBAND_HZ)
    report = VerificationReport(target_gain=gain, tolerance=tolerance, mna_gain=mid.gain)

    if gain is not None and not _within(mid.magnitude, gain, tolerance):
        report.failures.append(
            f"MNA midband gain {mid.magnitude:.4g} outside {gain:g} +/- {tolerance:.0%}"
        )
    if gain is not None and gain < 0 and mid.gain.real > 0:
        report.failures.append("MNA output is not inverted")
    if {s[0] for s in ssc.sources} >= {"V1", "V2"} and ssc.input_neg != "0":
        cm = ssc.with_excitation({"V1": 1, "V2": 1})
        x = _solve(cm, MIDBAND_HZ)
        report.common_mode_gain = abs(cm.voltage(x, cm.output))
    if n_bjt:
        report.dc = solve_dc_all(circuit, params)
        for op in report.dc:
            for d in op.diagnostics:
                report.failures.append(f"{op.device}: {d} (V_CE = {op.v_ce:.3g} V)")
    return report


def check_design(
    cs: ComponentSet,
    params: BjtParams | None = None,
    opamp: OpAmpModel | None = None,
    tolerance: float | None = None,
    gain: float | None = None,
) -> VerificationReport:
    """Verify a designed set against its own target gain.

    Both the closed-form gain on the quantized values and the MNA midband gain
    must land within ``tolerance``.  The power stage has no gain target; there
    the MNA gain is checked against the closed-form value instead.
    """
    params = params or default_params()
    circuit = build_circuit(cs, params=params, opamp=opamp)
    target = gain if gain is not None else cs.target_gain
    report = check_circuit(circuit, params, target, tolerance, opamp)
    report.analytic_gain = analytic_gain(cs, params)
    report.stability_achieved = [b.stability_achieved for b in cs.bias]
    ref = target if target is not None else report.analytic_gain
    if not _within(report.analytic_gain, ref, report.tolerance):
        report.failures.append(
            f"closed-form gain {report.analytic_gain:.4g} outside {ref:g} +/- {report.tolerance:.0%}"
        )
    if target is None and not _within(report.mna_magnitude, ref, report.tolerance):
        report.failures.append(
            f"MNA midband gain {report.mna_magnitude:.4g} disagrees with closed form {ref:.4g}"
        )
    return report
