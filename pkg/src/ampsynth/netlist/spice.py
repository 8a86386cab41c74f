"""SPICE text for :class:`Circuit`: a deterministic writer and a tolerant reader.

The dialect is the subset this package emits.  The reader also accepts ``*``
comments anywhere, ``+`` continuation lines, upper/lower case keywords and
free whitespace, and rejects everything else with a line number.
"""

from __future__ import annotations

import re

from ..values import format_magnitude as fmt
from ..values import parse_magnitude
from .circuit import (
    ARITY,
    KINDS,
    Ac,
    Circuit,
    CircuitError,
    Element,
    Model,
    Source,
    Subckt,
    Tran,
)

__all__ = ["ParseError", "emit", "parse"]

_ELEMENT_ORDER = {"V": 0, "R": 1, "C": 2, "Q": 3, "X": 4, "E": 5, "G": 6}
_DIRECTIVE_ORDER = {Model: 0, Subckt: 1, Tran: 2, Ac: 3}


class ParseError(ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


# --- writer ----------------------------------------------------------------

def _source_text(s: Source) -> str:
    parts = []
    if s.dc is not None:
        parts.append(f"DC {fmt(s.dc)}")
    if s.ac is not None:
        parts.append(f"AC {fmt(s.ac)}" + (f" {fmt(s.ac_phase)}" if s.ac_phase else ""))
    if s.sine is not None:
        parts.append("SINE({} {} {})".format(*(fmt(v) for v in s.sine)))
    return " ".join(parts)


def _card(e: Element) -> str:
    head = " ".join((e.label, *e.nodes))
    kind = e.kind
    if kind in ("R", "C", "E", "G"):
        return f"{head} {fmt(e.value)}"
    if kind == "V":
        return f"{head} {_source_text(e.source)}"
    if kind in ("Q", "X"):
        return f"{head} {e.model}"
    raise CircuitError(f"{e.label}: cannot emit element kind {kind!r}")


def _sorted_elements(elements) -> list[Element]:
    return sorted(elements, key=lambda e: _ELEMENT_ORDER[e.kind])


def emit(c: Circuit) -> str:
    """Render ``c`` as netlist text ending in ``.end``."""
    c.validate()
    lines = [f"* {c.title}".rstrip()]
    lines += [_card(e) for e in _sorted_elements(c.elements)]
    for d in sorted(c.directives, key=lambda d: _DIRECTIVE_ORDER[type(d)]):
        if isinstance(d, Model):
            params = " ".join(f"{k}={fmt(v)}" for k, v in d.params)
            lines.append(f".model {d.name} {d.type}({params})")
        elif isinstance(d, Subckt):
            lines.append(" ".join((".subckt", d.name, *d.pins)))
            lines += [_card(e) for e in _sorted_elements(d.elements)]
            lines.append(f".ends {d.name}")
        elif isinstance(d, Tran):
            lines.append(f".tran {fmt(d.step)} {fmt(d.stop)}")
        elif isinstance(d, Ac):
            lines.append(f".ac {d.sweep} {d.points} {fmt(d.f_start)} {fmt(d.f_stop)}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


# --- reader ----------------------------------------------------------------

_MODEL = re.compile(r"^\.model\s+(\S+)\s+([A-Za-z]+)\s*(.*)$", re.IGNORECASE)
_PARAM = re.compile(r"([A-Za-z_]\w*)\s*=\s*([^\s,()=]+)")


def _logical_lines(text: str) -> tuple[str, list[tuple[int, str]]]:
    title = ""
    out: list[list] = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            if lineno == 1:
                title = line[1:].strip()
            continue
        if line.startswith("+"):
            if not out:
                raise ParseError(lineno, "continuation line with nothing to continue")
            out[-1][1] += " " + line[1:].strip()
            continue
        out.append([lineno, line])
    return title, [(n, s) for n, s in out]


def _num(tok: str, lineno: int, what: str) -> float:
    try:
        return parse_magnitude(tok)
    except ValueError as exc:
        raise ParseError(lineno, f"{what}: {exc}") from None


def _parse_source(tokens: list[str], lineno: int) -> Source:
    dc = ac = sine = None
    phase = 0.0
    i = 0
    while i < len(tokens):
        key = tokens[i].upper()
        if key == "DC":
            if i + 1 >= len(tokens):
                raise ParseError(lineno, "DC needs a value")
            dc = _num(tokens[i + 1], lineno, "DC")
            i += 2
        elif key == "AC":
            if i + 1 >= len(tokens):
                raise ParseError(lineno, "AC needs a magnitude")
            ac = _num(tokens[i + 1], lineno, "AC")
            i += 2
            if i < len(tokens) and tokens[i].upper() not in ("DC", "AC", "SINE", "SIN"):
                phase = _num(tokens[i], lineno, "AC phase")
                i += 1
        elif key in ("SINE", "SIN"):
            args = tokens[i + 1:i + 4]
            if len(args) != 3:
                raise ParseError(lineno, "SINE needs (offset amplitude frequency)")
            sine = tuple(_num(t, lineno, "SINE") for t in args)
            i += 4
        elif i == 0:
            dc = _num(tokens[0], lineno, "source value")
            i += 1
        else:
            raise ParseError(lineno, f"unexpected source token {tokens[i]!r}")
    if dc is None and ac is None and sine is None:
        raise ParseError(lineno, "voltage source needs a value")
    return Source(dc=dc, ac=ac, ac_phase=phase, sine=sine)


def _parse_element(line: str, lineno: int) -> Element:
    label = line.split(None, 1)[0]
    kind = label[0].upper()
    if kind not in KINDS:
        raise ParseError(lineno, f"unknown element letter {label[0]!r} in {label}")
    if kind == "V":
        spec = re.sub(r"[(),]", " ", line)
        tokens = spec.split()
        if len(tokens) < 4:
            raise ParseError(lineno, f"{label}: expected 2 nodes and a value")
        return Element(label, tuple(tokens[1:3]), source=_parse_source(tokens[3:], lineno))

    tokens = line.split()
    if kind == "X":
        if len(tokens) < 3:
            raise ParseError(lineno, f"{label}: expected pins and a subcircuit name")
        return Element(label, tuple(tokens[1:-1]), model=tokens[-1])
    arity = ARITY[kind]
    want = 1 + arity + 1
    if len(tokens) != want:
        what = "model" if kind == "Q" else "value"
        if len(tokens) == want - 1:
            raise ParseError(lineno, f"{label}: missing {what}")
        raise ParseError(lineno, f"{label}: expected {arity} nodes and a {what}, got {len(tokens) - 1} fields")
    nodes = tuple(tokens[1:1 + arity])
    if kind == "Q":
        return Element(label, nodes, model=tokens[-1])
    return Element(label, nodes, value=_num(tokens[-1], lineno, label))


def parse(text: str) -> Circuit:
    """Read netlist text back into a :class:`Circuit`."""
    title, lines = _logical_lines(text)
    elements: list[Element] = []
    directives: list = []
    line_of: dict[str, int] = {}
    sub = None  # (name, pins, elements, lineno) while inside .subckt
    ended = False

    for lineno, line in lines:
        if line.startswith("."):
            word = line.split(None, 1)[0].lower()
            tokens = line.split()
            if word == ".end":
                if sub is not None:
                    raise ParseError(sub[3], f"unterminated .subckt {sub[0]}")
                ended = True
                break
            if word == ".subckt":
                if sub is not None:
                    raise ParseError(lineno, "nested .subckt not supported")
                if len(tokens) < 3:
                    raise ParseError(lineno, ".subckt needs a name and pins")
                sub = (tokens[1], tuple(tokens[2:]), [], lineno)
            elif word == ".ends":
                if sub is None:
                    raise ParseError(lineno, ".ends without .subckt")
                directives.append(Subckt(sub[0], sub[1], tuple(sub[2])))
                sub = None
            elif word == ".model":
                m = _MODEL.match(line)
                if m is None:
                    raise ParseError(lineno, "malformed .model card")
                params = tuple(
                    (k, _num(v, lineno, f"model parameter {k}")) for k, v in _PARAM.findall(m.group(3))
                )
                directives.append(Model(m.group(1), m.group(2).upper(), params))
            elif word == ".tran":
                if len(tokens) != 3:
                    raise ParseError(lineno, ".tran needs step and stop time")
                directives.append(Tran(_num(tokens[1], lineno, ".tran"), _num(tokens[2], lineno, ".tran")))
            elif word == ".ac":
                if len(tokens) != 5:
                    raise ParseError(lineno, ".ac needs sweep, points, start and stop")
                try:
                    points = int(tokens[2])
                except ValueError:
                    raise ParseError(lineno, f".ac points must be an integer, got {tokens[2]!r}") from None
                directives.append(
                    Ac(tokens[1].lower(), points, _num(tokens[3], lineno, ".ac"), _num(tokens[4], lineno, ".ac"))
                )
            else:
                raise ParseError(lineno, f"unsupported directive {word}")
            continue

        element = _parse_element(line, lineno)
        if sub is not None:
            sub[2].append(element)
        else:
            elements.append(element)
            line_of[element.label.upper()] = lineno

    if sub is not None:
        raise ParseError(sub[3], f"unterminated .subckt {sub[0]}")
    if not ended:
        last = lines[-1][0] if lines else 1
        raise ParseError(last, "missing .end")

    circuit = Circuit(title, tuple(elements), tuple(directives))
    try:
        circuit.validate()
    except CircuitError as exc:
        label = str(exc).split(":", 1)[0].split()[-1].upper()
        raise ParseError(line_of.get(label, 1), str(exc)) from None
    return circuit
