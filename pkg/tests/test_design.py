from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampsynth.design import (
    DesignError,
    DiffAmpSpec,
    GainTarget,
    OpAmpSpec,
    PowerAmpSpec,
    Qualifier,
    SingleStageSpec,
    TwoStageSpec,
    analytic_gain,
    design_diff_amp,
    design_opamp,
    design_power_amp,
    design_single_stage,
    design_two_stage,
    solve_bias_divider,
    solve_collector_resistor,
)
from ampsynth.design.opamp import opamp_config
from ampsynth.devices import h_composite
from ampsynth.values import get_series

from oracles import expanded, frac_parallel, scan_quantize

E24 = expanded("E24")
E6 = expanded("E6")


def s_of(beta, r_e, r_b):
    """Stability factor, written out independently of the package."""
    return (1 + beta) / (1 + beta * r_e / (r_b + r_e))


def ce_gain_oracle(p, r_c, r_l):
    r_lp = r_c if r_l is None else r_c * r_l / (r_c + r_l)
    return p.h_fe_typ * r_lp / (p.h_ie + (p.h_ie * p.h_oe - p.h_fe_typ * p.h_re) * r_c)


def is_member(x, table):
    return any(abs(x - m) <= 1e-12 * m for m in table)


# --- bias divider ----------------------------------------------------------

def test_divider_inversion_substitutes_back():
    d = solve_bias_divider(8, 300, 1100, 12, 1.2, 0.7)
    # Closed-form inversion of s(R_b); checked by substitution rather than a
    # hand-computed constant.
    assert s_of(300, 1100, d.r_b) == pytest.approx(8, rel=1e-12)
    assert d.r_b == pytest.approx(1100 * (300 * 8 / (301 - 8) - 1), rel=1e-12)
    assert d.v_r2 == pytest.approx(1.9) and d.v_r1 == pytest.approx(10.1)
    assert d.r1 / d.r2 == pytest.approx(10.1 / 1.9, rel=1e-12)
    assert d.r1 * d.r2 / (d.r1 + d.r2) == pytest.approx(d.r_b, rel=1e-12)


@given(st.floats(1.01, 50), st.floats(50, 500), st.floats(1, 1e5), st.floats(3, 40), st.floats(0.1, 2))
def test_divider_properties(s, beta, r_e, v_cc, v_re):
    if not s < 1 + beta or v_cc <= v_re + 0.7:
        return
    d = solve_bias_divider(s, beta, r_e, v_cc, v_re, 0.7)
    assert s_of(beta, r_e, d.r_b) == pytest.approx(s, rel=1e-9)
    assert d.v_r1 + d.v_r2 == pytest.approx(v_cc, rel=1e-12)
    assert d.r1 * d.r2 / (d.r1 + d.r2) == pytest.approx(d.r_b, rel=1e-9)
    assert d.r1 / d.r2 == pytest.approx(d.v_r1 / d.v_r2, rel=1e-9)


@pytest.mark.parametrize("s", [1.0, 301.0, 0.5, 400])
def test_divider_stability_out_of_range(s):
    with pytest.raises(DesignError, match="stability factor out of range"):
        solve_bias_divider(s, 300, 1100, 12, 1.2, 0.7)


def test_divider_supply_too_low():
    with pytest.raises(DesignError, match="supply too low for bias string"):
        solve_bias_divider(8, 300, 1100, 1.5, 1.0, 0.7)


# --- single stage ----------------------------------------------------------

def test_single_stage_worked_example(params):
    cs = design_single_stage(SingleStageSpec(GainTarget(20), v0_peak=0.2), params)
    h = h_composite(params)
    assert h == pytest.approx(0.0075)
    rc_raw = 20 * 1100 / (100 - 20 * h)  # 22000/99.85
    assert cs.raw("RC") == pytest.approx(rc_raw, rel=1e-12)
    assert cs.raw("RC") == pytest.approx(220.33, abs=0.005)
    assert cs.quantized("RC") == scan_quantize(rc_raw, "nearest", E24) == 220
    b = cs.bias[0]
    assert b.v_ceq == pytest.approx(0.6)
    assert b.i_cq == pytest.approx(0.2 / rc_raw, rel=1e-12)
    assert b.v_re == 1.0
    assert cs.raw("RE") == pytest.approx(1.0 / (0.2 / rc_raw), rel=1e-12)
    # quantized chain: R_e sized from the standard R_C, then rounded down
    assert cs.quantized("RE") == scan_quantize(1.0 / (0.2 / 220), "lower", E24) == 1100
    assert b.v_cc == pytest.approx(1.80, abs=0.005)
    assert cs.quantized("VCC") == 9
    assert b.v_ceq + b.i_cq * (cs.raw("RC") + cs.raw("RE")) == pytest.approx(b.v_cc, rel=1e-9)


def test_single_stage_infeasible_gain(params):
    # denominator h_fe - A*h goes negative
    with pytest.raises(DesignError, match="gain exceeds device capability"):
        solve_collector_resistor(200, 100, 1100, 0.0075 * 100, None)
    with pytest.raises(DesignError, match="gain exceeds device capability"):
        design_single_stage(SingleStageSpec(GainTarget(20000)), params)


def test_single_stage_capacitors_sized_from_reactance(params):
    cs = design_single_stage(SingleStageSpec(GainTarget(20), r_l=10e3, r_s=50), params)
    v = cs.values("quantized")
    r_b = frac_parallel(Fraction(v["R1"]), Fraction(v["R2"]))
    f_l = 20
    x_ce = v["RE"] / 10
    x_cb = 50 + float(frac_parallel(r_b, Fraction(params.h_ie)))
    x_cc = v["RC"] + 10e3
    for label, x in (("CE", x_ce), ("CB", x_cb), ("CC", x_cc)):
        c = 1 / (2 * math.pi * f_l * x)
        assert cs.components[label].nominal == pytest.approx(c, rel=1e-9)
        assert cs.quantized(label) == scan_quantize(c, "higher", E6)


@pytest.mark.parametrize("q, cmp", [(Qualifier.AT_LEAST, lambda g, t: g >= t),
                                    (Qualifier.AT_MOST, lambda g, t: g <= t)])
def test_qualifier_monotonicity(params, q, cmp):
    rng = random.Random(7)
    for _ in range(200):
        target = rng.uniform(2, 150)
        cs = design_single_stage(SingleStageSpec(GainTarget(target, q)), params)
        g = ce_gain_oracle(params, cs.quantized("RC"), None)
        assert cmp(g, target * (1 + 1e-12) if q is Qualifier.AT_LEAST else target), (target, g)


def test_component_set_members_are_standard(params):
    cs = design_single_stage(SingleStageSpec(GainTarget(35), r_l=4.7e3, v_cc=12), params)
    for label, c in cs.components.items():
        if c.kind == "R" and c.direction is not None:
            assert is_member(c.quantized, E24), label
        elif c.kind == "C":
            assert is_member(c.quantized, E6), label
    for b in cs.bias:
        assert 1 < b.stability_achieved < 1 + params.h_fe_max


def test_other_series_respected(params):
    cs = design_single_stage(SingleStageSpec(GainTarget(20)), params, series="E12", cap_series="E12")
    e12 = expanded("E12")
    assert all(is_member(c.quantized, e12) for c in cs.components.values() if c.kind in "RC"
               and c.direction is not None)
    assert get_series("E12").name == "E12"


# --- two stage -------------------------------------------------------------

def test_two_stage_split_and_stage2(params):
    cs = design_two_stage(TwoStageSpec(GainTarget(100)), params)
    assert cs.extras["stage_gain"] == 10
    assert cs.raw("RC2") == pytest.approx(10 * 1100 / 100, rel=1e-12)


def test_parallel_unwrap_worked_example():
    # R_C1 such that R_C1 || R_b2 || h_ie = A_v1*h_ie/h_fe with R_b2 = 1k
    from ampsynth.design.bjt import _unwrap_parallel

    target = Fraction(10 * 1100, 100)
    rest = frac_parallel(Fraction(1000), Fraction(1100))
    rc1 = _unwrap_parallel(float(target), float(rest), 1)
    assert float(frac_parallel(Fraction(rc1), Fraction(1000), Fraction(1100))) == pytest.approx(110, rel=1e-12)
    assert rc1 == pytest.approx(float(1 / (1 / target - 1 / rest)), rel=1e-12)


def test_two_stage_stage_gains_equal(params):
    cs = design_two_stage(TwoStageSpec(GainTarget(64), r_l=22e3, v_cc=15), params)
    v = cs.values("raw")
    r_b2 = v["R3"] * v["R4"] / (v["R3"] + v["R4"])
    a2 = params.h_fe_typ * (v["RC2"] * 22e3 / (v["RC2"] + 22e3)) / params.h_ie
    a1 = params.h_fe_typ / params.h_ie / (1 / v["RC1"] + 1 / r_b2 + 1 / params.h_ie)
    assert a1 == pytest.approx(8, rel=1e-9) and a2 == pytest.approx(8, rel=1e-9)


def test_two_stage_errors_name_stage(params):
    with pytest.raises(DesignError, match="stage"):
        design_two_stage(TwoStageSpec(GainTarget(1e6)), params)


def test_two_stage_requires_gain_above_one():
    with pytest.raises(DesignError):
        TwoStageSpec(GainTarget(1.0))


# --- op-amp ----------------------------------------------------------------

def test_opamp_non_inverting():
    cs = design_opamp(OpAmpSpec(GainTarget(11)))
    assert cs.config == "non-inverting"
    assert (cs.quantized("R1"), cs.quantized("R2")) == (1000, 10000)


def test_opamp_t_network():
    cs = design_opamp(OpAmpSpec(GainTarget(-100)))
    assert cs.config == "inverting-t"
    for r in ("R1", "R2", "R4"):
        assert cs.quantized(r) == 10e3
    assert cs.raw("R3") == pytest.approx(10000 / 98, rel=1e-12)
    assert cs.quantized("R3") == scan_quantize(10000 / 98, "nearest", E24) == 100
    assert analytic_gain(cs, which="raw") == pytest.approx(-100, rel=1e-12)
    assert analytic_gain(cs) == pytest.approx(-(1 + 1 + 10000 / 100), rel=1e-12)


def test_opamp_follower_and_plain_pair():
    f = design_opamp(OpAmpSpec(GainTarget(1)))
    assert f.config == "follower" and not f.components
    p = design_opamp(OpAmpSpec(GainTarget(-1.5)))
    assert p.config == "inverting" and "R3" not in p
    assert any("plain" in n for n in p.notes)


@pytest.mark.parametrize("g", [0.5, -0.5, 0.99])
def test_opamp_attenuator_rejected(g):
    with pytest.raises(DesignError, match="attenuator not supported"):
        opamp_config(g)


# --- difference amplifier --------------------------------------------------

@pytest.mark.parametrize("a_d, r2", [(5, 51e3), (1, 10e3), (7.5, 75e3)])
def test_diff_amp(a_d, r2):
    cs = design_diff_amp(DiffAmpSpec(a_d))
    assert cs.raw("R2") == pytest.approx(a_d * 10e3) and cs.raw("R1") == 10e3
    assert cs.quantized("R2") == cs.quantized("R4") == scan_quantize(a_d * 10e3, "nearest", E24) == r2
    assert cs.quantized("R1") == cs.quantized("R3") == 10e3
    assert analytic_gain(cs) == cs.quantized("R2") / cs.quantized("R1")


# --- power amplifier -------------------------------------------------------

def test_power_amp_worked_example(params):
    cs = design_power_amp(PowerAmpSpec(0.5, 12, 8), params)
    b = cs.bias[0]
    assert b.v_re == pytest.approx(1.2) and b.v_ceq == pytest.approx(10.8)
    assert b.v_ce_peak == pytest.approx(10.6)
    assert b.i_c_peak == pytest.approx(1 / 10.6, rel=1e-12)
    assert cs.raw("RE") == pytest.approx(1.2 * 10.6, rel=1e-12)  # 12.72
    assert cs.quantized("RE") == 12
    assert b.r_l_prime == pytest.approx(10.6**2, rel=1e-12)  # 112.36
    assert cs.quantized("N") == pytest.approx(math.sqrt(112.36 / 8), rel=1e-12)
    assert cs.raw("N") == cs.quantized("N")
    assert 0.5 * b.v_ce_peak * b.i_c_peak == pytest.approx(0.5, rel=1e-12)
    assert b.p_re == pytest.approx(1.2**2 / cs.raw("RE"), rel=1e-12)
    assert b.r_l_prime * b.i_c_peak == pytest.approx(b.v_ce_peak, rel=1e-12)
    assert cs.extras["CE_unplaced"] == pytest.approx(1 / (2 * math.pi * 50 * 8), rel=1e-12)
    assert "CE" not in cs


def test_power_amp_unity_turns_ratio(params):
    # choose R_L equal to R_L' so the transformer is 1:1
    v_ce_pk = 12 - 1.2 - params.v_ce_sat
    r_l = v_ce_pk**2 / (2 * 0.5)
    cs = design_power_amp(PowerAmpSpec(0.5, 12, r_l), params)
    assert cs.quantized("N") == pytest.approx(1.0, rel=1e-12)


def test_power_amp_errors(params):
    with pytest.raises(DesignError, match="supply too low for requested swing"):
        design_power_amp(PowerAmpSpec(0.5, 0.2, 8), params)
    with pytest.raises(DesignError, match="outside the buildable range"):
        design_power_amp(PowerAmpSpec(1e-15, 12, 8), params)
