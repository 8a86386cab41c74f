"""Device parameters: BJT h-parameters and the ideal op-amp model."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .values import parse_magnitude

__all__ = [
    "BjtParams",
    "ConfigError",
    "OpAmpModel",
    "default_params",
    "dump_params",
    "h_composite",
    "load_params",
    "parse_params",
]


class ConfigError(ValueError):
    """Bad or incomplete parameter file."""


@dataclass(frozen=True)
class BjtParams:
    """Small-signal h-parameters and junction constants of one BJT type.

    ``h_fe_typ`` drives the gain equations; ``h_fe_max`` only enters the
    bias stability factor.
    """

    h_fe_typ: float
    h_fe_max: float
    h_ie: float
    h_re: float
    h_oe: float
    h_fe_min: float | None = None
    v_be_on: float = 0.7
    v_ce_sat: float = 0.2
    i_c_min: float = 0.0
    name: str = "npn"

    def __post_init__(self) -> None:
        if self.h_fe_min is None:
            object.__setattr__(self, "h_fe_min", self.h_fe_typ)
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite")
        for key in ("h_fe_typ", "h_fe_min", "h_fe_max", "h_ie", "h_oe", "v_be_on", "v_ce_sat"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be > 0")
        if self.h_re < 0:
            raise ConfigError("h_re must be >= 0")
        if self.i_c_min < 0:
            raise ConfigError("i_c_min must be >= 0")
        if not self.h_fe_min <= self.h_fe_typ <= self.h_fe_max:
            raise ConfigError(
                f"h_fe ordering violated: need h_fe_min ({self.h_fe_min:g}) <= "
                f"h_fe_typ ({self.h_fe_typ:g}) <= h_fe_max ({self.h_fe_max:g})"
            )
        if abs(h_composite(self)) >= 1:
            raise ConfigError("h_composite out of small-signal range (|h_ie*h_oe - h_fe*h_re| >= 1)")


@dataclass(frozen=True)
class OpAmpModel:
    open_loop_gain: float = 1e7
    mode: str = "ideal"

    def __post_init__(self) -> None:
        if not self.open_loop_gain >= 1e6:
            raise ConfigError("open_loop_gain must be >= 1e6")
        if self.mode != "ideal":
            raise ConfigError(f"unsupported op-amp mode {self.mode!r}")


def h_composite(p: BjtParams) -> float:
    """h = h_ie*h_oe - h_fe*h_re, using the typical current gain."""
    return p.h_ie * p.h_oe - p.h_fe_typ * p.h_re


_REQUIRED = ("h_fe_typ", "h_fe_max", "h_ie", "h_re", "h_oe")
_NUMERIC = {f.name for f in dataclasses.fields(BjtParams)} - {"name"}


def parse_params(text: str, source: str = "<string>") -> BjtParams:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        if key == "name":
            values[key] = val
        elif key in _NUMERIC:
            try:
                values[key] = parse_magnitude(val)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"{key} required")
    return BjtParams(**values)  # type: ignore[arg-type]


def load_params(path: str | Path) -> BjtParams:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from None
    return parse_params(text, str(path))


def dump_params(p: BjtParams) -> str:
    lines = [f"name = {p.name}"]
    for f in dataclasses.fields(p):
        if f.name != "name":
            lines.append(f"{f.name} = {getattr(p, f.name)!r}")
    return "\n".join(lines) + "\n"


def default_params() -> BjtParams:
    """The shipped 2N2222 defaults."""
    text = resources.files("ampsynth").joinpath("data/2n2222.params").read_text()
    return parse_params(text, "2n2222.params")
