"""Amplifier synthesis with SPICE netlist output and small-signal checks."""

from __future__ import annotations

__version__ = "0.1.0"
