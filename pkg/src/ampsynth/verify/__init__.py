"""Small-signal and bias verification of designed circuits."""

from __future__ import annotations

from .check import (
    DEFAULT_TOLERANCE,
    MIDBAND_HZ,
    TWO_STAGE_TOLERANCE,
    VerificationReport,
    check_circuit,
    check_design,
)
from .dc import DcOperatingPoint, solve_dc, solve_dc_all
from .linalg import SingularMatrixError, lu_factor, lu_solve, solve
from .mna import (
    RESIDUAL_LIMIT,
    AcResult,
    DegenerateCircuitError,
    ModelError,
    SmallSignalCircuit,
    small_signal_of,
    solve_ac,
    solve_nodes,
    sweep,
    sweep_csv,
)

__all__ = [
    "AcResult",
    "DEFAULT_TOLERANCE",
    "DcOperatingPoint",
    "DegenerateCircuitError",
    "MIDBAND_HZ",
    "ModelError",
    "RESIDUAL_LIMIT",
    "SingularMatrixError",
    "SmallSignalCircuit",
    "TWO_STAGE_TOLERANCE",
    "VerificationReport",
    "check_circuit",
    "check_design",
    "lu_factor",
    "lu_solve",
    "small_signal_of",
    "solve",
    "solve_ac",
    "solve_dc",
    "solve_dc_all",
    "solve_nodes",
    "sweep",
    "sweep_csv",
]
