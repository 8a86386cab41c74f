"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from ampsynth.cli import main  # noqa: E402
from ampsynth.design import (  # noqa: E402
    DiffAmpSpec,
    GainTarget,
    OpAmpSpec,
    PowerAmpSpec,
    analytic_gain,
    design_diff_amp,
    design_opamp,
    design_power_amp,
)
from ampsynth.devices import OpAmpModel, default_params  # noqa: E402
from ampsynth.netlist import build_circuit, emit, parse  # noqa: E402
from ampsynth.values import Direction, quantize  # noqa: E402
from ampsynth.verify import SmallSignalCircuit, check_design, small_signal_of, solve_ac  # noqa: E402

import exactness  # noqa: E402
from oracles import expanded, ladder_gain, scan_quantize  # noqa: E402

RESULTS: list[str] = []
P = default_params()


def record(name: str, ok: bool, detail: str) -> bool:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _mna(cs, f=1e3):
    return solve_ac(small_signal_of(build_circuit(cs, params=P), P, OpAmpModel()), f).gain


def _cli_gain(argv):
    """Run ``ampsynth design`` and measure the emitted netlist's midband gain."""
    with tempfile.TemporaryDirectory() as d:
        net, rep = Path(d) / "a.net", Path(d) / "a.txt"
        t0 = time.perf_counter()
        code = main(["design", *argv, "--out", str(net), "--report", str(rep)])
        dt = time.perf_counter() - t0
        circuit = parse(net.read_text())
    return code, abs(solve_ac(small_signal_of(circuit, P), 1e3).gain), dt


def test_single_stage_gain():
    code, g, dt = _cli_gain(["single-stage", "--gain", "20"])
    assert record("single-stage gain 20", code == 0 and 17 <= g <= 23 and dt < 1,
                  f"MNA |A| = {g:.4f} in [17, 23], {dt * 1e3:.0f} ms, exit {code}")


def test_two_stage_gain():
    code, g, dt = _cli_gain(["two-stage", "--gain", "100"])
    assert record("two-stage gain 100", code == 0 and 75 <= g <= 125 and dt < 1,
                  f"MNA |A| = {g:.3f} in [75, 125], {dt * 1e3:.0f} ms, exit {code}")


def test_opamp_gains():
    parts, ok = [], True
    for g in (10, -10):
        cs = design_opamp(OpAmpSpec(GainTarget(g)))
        a, m = analytic_gain(cs), _mna(cs)
        good = abs(a - g) <= 0.1 * abs(g) and abs(m - g) <= 0.1 * abs(g)
        ok &= good
        parts.append(f"{g:+d}: analytic {a:.4g}, MNA {m.real:.4g}")
    cs = design_opamp(OpAmpSpec(GainTarget(-100)))
    a = analytic_gain(cs)
    dev = abs(a + 100) / 100
    ok &= dev <= 0.05
    parts.append(f"-100 T-network: analytic {a:.4g} ({dev:.1%})")
    assert record("op-amp gains", ok, "; ".join(parts))


def test_difference_amplifier():
    cs = design_diff_amp(DiffAmpSpec(5))
    r = cs.values()
    a_d = analytic_gain(cs)
    exact = a_d == r["R2"] / r["R1"] == r["R4"] / r["R3"]
    rep = check_design(cs, P)
    dev = abs(rep.mna_magnitude - a_d) / a_d
    ok = exact and dev <= 1e-3 and rep.common_mode_gain <= 1e-5
    assert record("difference amplifier", ok,
                  f"A_d = {a_d:g} = R2/R1 = R4/R3, MNA dev {dev:.1e}, CM gain {rep.common_mode_gain:.1e}")


def test_power_amp_identities():
    cs = design_power_amp(PowerAmpSpec(0.5, 12, 8), P)
    b = cs.bias[0]
    e_p = abs(0.5 * b.v_ce_peak * b.i_c_peak - 0.5) / 0.5
    ratio = cs.raw("N")
    e_n = abs(ratio - math.sqrt(b.r_l_prime / 8))
    ok = e_p <= 1e-12 and e_n == 0 and ratio == cs.quantized("N")
    assert record("power amplifier identities", ok,
                  f"P rel err {e_p:.1e}, N = {ratio:.6f} = sqrt(R_L'/R_L) (diff {e_n:g})")


def test_raw_design_exactness():
    worst = {k: f(P) for k, f in exactness.CHECKS.items()}
    ok = all(v <= 1e-9 for v in worst.values())
    assert record("raw-design exactness (500 specs/topology)", ok,
                  ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_quantizer_oracle():
    table = expanded("E24")
    rng = random.Random(5)
    mism = 0
    law_fail = 0
    dirs = {"higher": Direction.HIGHER, "lower": Direction.LOWER, "nearest": Direction.NEAREST}
    for _ in range(10_000):
        x = 10 ** rng.uniform(-3, 9)
        q = {k: quantize(x, d) for k, d in dirs.items()}
        mism += sum(q[k] != scan_quantize(x, k, table) for k in dirs)
        law_fail += not (q["lower"] <= x <= q["higher"] and q["nearest"] in (q["lower"], q["higher"]))
        law_fail += sum(quantize(q[k], d) != q[k] for k, d in dirs.items())
    assert record("quantizer oracle", mism == 0 and law_fail == 0,
                  f"10000 values x 3 directions: {mism} mismatches, {law_fail} law violations")


def test_netlist_roundtrip():
    from test_netlist import _random_circuit, designs

    bad = 0
    for cs in designs(P).values():
        text = emit(build_circuit(cs, params=P))
        bad += emit(parse(text)) != text
    rng = random.Random(99)
    for _ in range(100):
        text = emit(_random_circuit(rng))
        bad += emit(parse(text)) != text
    assert record("netlist round-trip", bad == 0, f"all topologies + 100 random circuits, {bad} unstable")


def test_mna_validation():
    from test_verify import _ladder_ssc, _random_ladder

    rng = random.Random(314)
    worst = 0.0
    for _ in range(1000):
        sections, load = _random_ladder(rng)
        f = 10 ** rng.uniform(0, 6)
        got = solve_ac(_ladder_ssc(sections, load), f).gain
        want = ladder_gain(sections, f, load)
        worst = max(worst, abs(got - want) / abs(want))
    fc = 1 / (2 * math.pi * 1e3 * 1e-6)
    rc = SmallSignalCircuit(conductances=(("in", "out", 1e-3),), capacitances=(("out", "0", 1e-6),),
                            sources=(("V1", "in", "0", 1 + 0j),))
    corner = abs(solve_ac(rc, fc).magnitude - 1 / math.sqrt(2))
    ok = worst <= 1e-9 and corner <= 1e-6
    assert record("MNA validation", ok, f"1000 ladders worst rel err {worst:.1e}; RC corner err {corner:.1e}")


ALL = [test_single_stage_gain, test_two_stage_gain, test_opamp_gains, test_difference_amplifier,
       test_power_amp_identities, test_raw_design_exactness, test_quantizer_oracle,
       test_netlist_roundtrip, test_mna_validation]


if __name__ == "__main__":
    failed = 0
    for fn in ALL:
        try:
            fn()
        except AssertionError:
            failed += 1
    print("\n".join(RESULTS))
    sys.exit(1 if failed else 0)
