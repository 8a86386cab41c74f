"""Command-line front end: ``ampsynth design|verify|sweep``.

Exit status is 0 when verification passes, 2 when it fails and 1 for any
usage, parse, design or I/O error.
"""

from __future__ import annotations

import argparse
import cmath
import math
import re
import sys
from pathlib import Path

from . import __version__
from .design import (
    ComponentSet,
    DesignError,
    DiffAmpSpec,
    GainTarget,
    OpAmpSpec,
    PowerAmpSpec,
    Qualifier,
    SingleStageSpec,
    TwoStageSpec,
    design_diff_amp,
    design_opamp,
    design_power_amp,
    design_single_stage,
    design_two_stage,
)
from .devices import BjtParams, ConfigError, OpAmpModel, default_params, load_params
from .netlist import CircuitError, ParseError, build_circuit, emit, parse
from .values import MagnitudeParseError, format_magnitude, parse_magnitude
from .verify import (
    DegenerateCircuitError,
    ModelError,
    VerificationReport,
    check_circuit,
    check_design,
    small_signal_of,
    sweep,
    sweep_csv,
)

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

_UNITS = {"R": "", "C": "F", "V": "V", "ratio": ""}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "verification failed" here
        raise UsageError(f"{self.prog}: {message}")


def _magnitude(text: str) -> float:
    try:
        return parse_magnitude(text)
    except MagnitudeParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("need at least 2 points")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ampsynth", description="Amplifier design, netlist generation and verification.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    d = sub.add_parser("design", help="size an amplifier and write its netlist")
    d.add_argument("topology", choices=["single-stage", "two-stage", "opamp", "diff", "power"])
    g = d.add_mutually_exclusive_group()
    g.add_argument("--gain", type=_magnitude, help="exact target gain")
    g.add_argument("--gain-min", type=_magnitude, help="gain of at least this value")
    g.add_argument("--gain-max", type=_magnitude, help="gain of at most this value")
    d.add_argument("--v0-peak", type=_magnitude)
    d.add_argument("--vcc", type=_magnitude)
    d.add_argument("--rl", type=_magnitude)
    d.add_argument("--rs", type=_magnitude, default=0.0)
    d.add_argument("--fl", type=_magnitude)
    d.add_argument("--stability", type=_magnitude)
    d.add_argument("--power", type=_magnitude, help="load power for the power stage (W)")
    d.add_argument("--rbase", type=_magnitude, help="largest resistor for op-amp networks")
    d.add_argument("--series", choices=["e6", "e12", "e24"], default="e24")
    d.add_argument("--cap-series", choices=["e6", "e12", "e24"], default="e6")
    d.add_argument("--tolerance", type=float, help="relative gain tolerance, e.g. 0.15")
    _common(d)
    d.add_argument("--out", type=Path, help="netlist path (stdout if omitted)")

    v = sub.add_parser("verify", help="check a netlist's midband gain and bias point")
    v.add_argument("netlist", type=Path)
    v.add_argument("--gain", type=_magnitude, help="target gain (default: gain= in the title)")
    v.add_argument("--tolerance", type=float)
    _common(v)

    s = sub.add_parser("sweep", help="AC sweep of a netlist to CSV")
    s.add_argument("netlist", type=Path)
    s.add_argument("--from", dest="f_start", type=_magnitude, default=1.0)
    s.add_argument("--to", dest="f_stop", type=_magnitude, default=1e6)
    s.add_argument("--points", type=_positive_int, default=61)
    s.add_argument("--params", type=Path)
    s.add_argument("--csv", type=Path, help="output path (stdout if omitted)")
    return ap


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", type=Path, help="BJT parameter file")
    p.add_argument("--report", type=Path, help="write the report here instead of stdout")


def _params(path: Path | None) -> BjtParams:
    return load_params(path) if path is not None else default_params()


def _target(args) -> GainTarget | None:
    for attr, q in (("gain", Qualifier.EXACT), ("gain_min", Qualifier.AT_LEAST),
                    ("gain_max", Qualifier.AT_MOST)):
        val = getattr(args, attr)
        if val is not None:
            return GainTarget(val, q)
    return None


def _require(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"design {args.topology}: missing {flags}")


def _design(args, params: BjtParams) -> ComponentSet:
    topo = args.topology
    series, caps = args.series.upper(), args.cap_series.upper()
    if topo == "power":
        _require(args, "power", "vcc", "rl")
        kw = {k: v for k, v in (("f_l", args.fl), ("stability", args.stability)) if v is not None}
        return design_power_amp(PowerAmpSpec(args.power, args.vcc, args.rl, **kw), params, series, caps)

    target = _target(args)
    if target is None:
        raise UsageError(f"design {topo}: one of --gain, --gain-min, --gain-max is required")
    if topo in ("opamp", "diff"):
        kw = {"r_base": args.rbase} if args.rbase is not None else {}
        if topo == "diff":
            return design_diff_amp(DiffAmpSpec(target.value, **kw), series)
        return design_opamp(OpAmpSpec(target, **kw), series)

    kw = {k: v for k, v in (("f_l", args.fl), ("stability", args.stability)) if v is not None}
    cls, fn = (SingleStageSpec, design_single_stage) if topo == "single-stage" else (TwoStageSpec, design_two_stage)
    spec = cls(target, v0_peak=args.v0_peak, v_cc=args.vcc, r_l=args.rl, r_s=args.rs, **kw)
    return fn(spec, params, series, caps)


def _fmt(value: float | None, kind: str) -> str:
    if value is None:
        return "-"
    if kind == "ratio":
        return f"{value:.6g}"
    return format_magnitude(value) + _UNITS.get(kind, "")


def format_design(cs: ComponentSet) -> str:
    """Component table with every value chain, followed by the bias records."""
    title = cs.topology + (f" ({cs.config})" if cs.config and cs.config != cs.topology else "")
    lines = [f"design: {title}"]
    if cs.target_gain is not None:
        lines.append(f"target gain: {cs.target_gain:g}")
    lines.append("")
    lines.append(f"{'part':<6}{'raw':>12}{'nominal':>12}{'quantized':>12}")
    for label, c in cs.components.items():
        lines.append(f"{label:<6}{_fmt(c.raw, c.kind):>12}{_fmt(c.nominal, c.kind):>12}"
                     f"{_fmt(c.quantized, c.kind):>12}")
    for b in cs.bias:
        lines.append("")
        lines.append(f"bias, stage {b.stage}:")
        rows = [("V_CEQ", b.v_ceq, "V"), ("I_CQ", b.i_cq, "A"), ("V_RE", b.v_re, "V"),
                ("V_CC", b.v_cc, "V"), ("V_CC rail", b.v_cc_rail, "V"), ("R_b", b.r_b, ""),
                ("V_CE,pk", b.v_ce_peak, "V"), ("I_C,pk", b.i_c_peak, "A"),
                ("R_L'", b.r_l_prime, ""), ("P_RE", b.p_re, "W")]
        for name, val, unit in rows:
            if val is not None:
                lines.append(f"  {name:<10}{format_magnitude(val)}{unit}")
        lines.append(f"  {'s (quant)':<10}{b.stability_achieved:.4g}")
    for key, val in cs.extras.items():
        if isinstance(val, (int, float)):
            lines.append(f"{key}: {val:.6g}")
    for note in cs.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def format_verification(r: VerificationReport) -> str:
    lines = ["verification:"]
    if r.target_gain is not None:
        lines.append(f"  target gain      {r.target_gain:g} (+/- {r.tolerance:.0%})")
    if r.analytic_gain is not None:
        lines.append(f"  closed-form gain {r.analytic_gain:.6g}")
    g = r.mna_gain
    phase = math.degrees(cmath.phase(g))
    lines.append(f"  MNA gain @1kHz   {abs(g):.6g} at {phase:.2f} deg")
    if r.common_mode_gain is not None:
        lines.append(f"  common-mode gain {r.common_mode_gain:.3g}")
    for op in r.dc:
        lines.append(f"  {op.device}: V_B={op.v_b:.4g} V  V_E={op.v_e:.4g} V  I_C={format_magnitude(op.i_c)}A"
                     f"  V_CE={op.v_ce:.4g} V")
    for s in r.stability_achieved:
        lines.append(f"  stability factor {s:.4g}")
    for f in r.failures:
        lines.append(f"  FAIL: {f}")
    lines.append("  result: " + ("PASS" if r.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _read_circuit(path: Path):
    text = path.read_text(encoding="utf-8")
    return parse(text)


def run_design(args) -> int:
    if args.out is not None and args.report is not None and args.out.resolve() == args.report.resolve():
        raise UsageError("--out and --report must be different files")
    params = _params(args.params)
    cs = _design(args, params)
    circuit = build_circuit(cs, params=params)
    report = check_design(cs, params, OpAmpModel(), args.tolerance)
    _write(args.out, emit(circuit))
    _write(args.report, format_design(cs) + "\n" + format_verification(report))
    return EXIT_OK if report.passed else EXIT_FAIL


_TITLE_GAIN = re.compile(r"\bgain=(\S+)")


def run_verify(args) -> int:
    params = _params(args.params)
    circuit = _read_circuit(args.netlist)
    gain = args.gain
    if gain is None:
        m = _TITLE_GAIN.search(circuit.title or "")
        if m:
            gain = parse_magnitude(m.group(1))
    report = check_circuit(circuit, params, gain, args.tolerance, OpAmpModel())
    _write(args.report, f"netlist: {args.netlist}\n" + format_verification(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def run_sweep(args) -> int:
    if not 0 < args.f_start < args.f_stop:
        raise UsageError("sweep: need 0 < --from < --to")
    params = _params(args.params)
    circuit = _read_circuit(args.netlist)
    ssc = small_signal_of(circuit, params, OpAmpModel())
    _write(args.csv, sweep_csv(sweep(ssc, args.f_start, args.f_stop, args.points)))
    return EXIT_OK


_HANDLERS = {"design": run_design, "verify": run_verify, "sweep": run_sweep}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except (DesignError, ConfigError, CircuitError, ModelError, DegenerateCircuitError,
            MagnitudeParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
