"""Circuit graph, SPICE netlist writer/reader and the design-to-circuit builder."""

from .build import OPAMP_SUBCKT, PROBE_LOAD, BuildError, build_circuit
from .circuit import GROUND, Ac, Circuit, CircuitError, Element, Model, Source, Subckt, Tran
from .spice import ParseError, emit, parse

__all__ = [
    "Ac", "BuildError", "Circuit", "CircuitError", "Element", "GROUND", "Model",
    "OPAMP_SUBCKT", "PROBE_LOAD", "ParseError", "Source", "Subckt", "Tran",
    "build_circuit", "emit", "parse",
]
