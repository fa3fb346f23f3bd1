"""Experiment configuration: flat key = value files with # comments.

An empty file yields the desk-scale defaults: the published field is
10000 nodes on 6000m x 6000m with r = 100m, and the defaults keep that
node density on a 2700m x 2700m field so full sweeps finish on a desk.
Arrays are comma-separated; exactly one of ``h`` and ``H`` may be a list
and becomes the sweep axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .protocols import PROTOCOLS

DEFAULTS = {
    "n_nodes": 2000,
    "field_side": 2700.0,
    "r": 100.0,
    "r0": 300.0,
    "omega": 6,
    "protocols": list(PROTOCOLS),
    "h": [5, 10, 15, 20],
    "H": [20],
    "packets_per_run": 400,
    "seeds": list(range(1, 31)),
    "output_path": "results.csv",
}

_INT_KEYS = {"n_nodes", "omega", "packets_per_run"}
_FLOAT_KEYS = {"field_side", "r", "r0"}
_INT_LIST_KEYS = {"h", "H", "seeds"}
_STR_LIST_KEYS = {"protocols"}
_STR_KEYS = {"output_path"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _INT_LIST_KEYS | _STR_LIST_KEYS | _STR_KEYS


@dataclass
class ExperimentConfig:
    n_nodes: int = DEFAULTS["n_nodes"]
    field_side: float = DEFAULTS["field_side"]
    r: float = DEFAULTS["r"]
    r0: float = DEFAULTS["r0"]
    omega: int = DEFAULTS["omega"]
    protocols: list[str] = field(default_factory=lambda: list(DEFAULTS["protocols"]))
    h: list[int] = field(default_factory=lambda: list(DEFAULTS["h"]))
    H: list[int] = field(default_factory=lambda: list(DEFAULTS["H"]))
    packets_per_run: int = DEFAULTS["packets_per_run"]
    seeds: list[int] = field(default_factory=lambda: list(DEFAULTS["seeds"]))
    output_path: str = DEFAULTS["output_path"]

    def validate(self) -> "ExperimentConfig":
        if self.n_nodes < 2:
            raise ValidationError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if self.field_side <= 0 or self.r <= 0:
            raise ValidationError("field_side and r must be positive")
        if self.r0 < self.r:
            raise ValidationError(f"r0 must be >= r, got r0={self.r0} r={self.r}")
        if self.omega < 2 or self.omega % 2 != 0:
            raise ValidationError(f"omega must be even and >= 2, got {self.omega}")
        if self.packets_per_run < 1:
            raise ValidationError("packets_per_run must be >= 1")
        if not self.seeds:
            raise ValidationError("seeds must be non-empty")
        if not self.protocols:
            raise ValidationError("protocols must be non-empty")
        for p in self.protocols:
            if p not in PROTOCOLS:
                raise ValidationError(
                    f"unknown protocol {p!r}; expected one of {PROTOCOLS}")
        if not self.h or not self.H:
            raise ValidationError("h and H must be non-empty")
        if len(self.h) > 1 and len(self.H) > 1:
            raise ValidationError(
                "exactly one of h and H may be a sweep list; fix the other")
        if any(v < 1 for v in self.h) or any(v < 1 for v in self.H):
            raise ValidationError("h and H values must be >= 1")
        return self

    @property
    def sweep_points(self) -> list[tuple[int, int]]:
        """(h, H) pairs in sweep order."""
        if len(self.H) > 1:
            return [(self.h[0], H) for H in self.H]
        return [(h, self.H[0]) for h in self.h]


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a config file; missing keys take the defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text, origin=str(path))
    return cfg.validate()


def parse_config(text: str, origin: str = "<config>") -> ExperimentConfig:
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ParseError(f"{origin}:{lineno}: unknown key {key!r}")
        if not value:
            raise ParseError(f"{origin}:{lineno}: empty value for {key!r}")
        try:
            setattr(cfg, key, _convert(key, value))
        except ValueError as exc:
            raise ParseError(f"{origin}:{lineno}: bad value for {key!r}: {exc}") from None
    return cfg


def _convert(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_LIST_KEYS:
        return [int(v.strip()) for v in value.split(",") if v.strip()]
    if key in _STR_LIST_KEYS:
        return [v.strip() for v in value.split(",") if v.strip()]
    return value
