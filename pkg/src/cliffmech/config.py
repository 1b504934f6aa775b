"""JSON configuration for ``cliffmech simulate``.

Example::

    {
      "schema_version": 1,
      "n": 1,
      "structure": "J1",
      "lagrangian": {"builtin": {"masses": [1.0], "gravity": 0.0, "height_index": 0}},
      "initial_x": [1, 0, 0, 0, 0, 0, 0, 0],
      "integrator": "rk4",
      "dt": 0.001,
      "steps": 10000,
      "rng_seed": 42
    }

``lagrangian`` may instead be ``{"expression": "0.5*(x0^2 + x1^2) + ..."}``.
``masses`` may be a single number, applied to every particle.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .dynamics import METHODS
from .geometry import LABELS, Dimension
from .lagrangian import BuiltinLagrangian, ExpressionLagrangian, LagrangianField

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(name, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SystemConfig:
    n: int
    structure: str
    lagrangian: dict
    initial_x: tuple[float, ...]
    integrator: str = "rk4"
    dt: float = 1e-3
    steps: int = 1000
    rng_seed: int = 0

    @property
    def dim(self) -> Dimension:
        return Dimension(self.n)

    @classmethod
    def from_dict(cls, data: Any) -> SystemConfig:
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected a JSON object")
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
        known = {"schema_version", "n", "structure", "lagrangian", "initial_x", "integrator", "dt", "steps", "rng_seed"}
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigError(extra[0], "unknown field")
        for required in ("n", "structure", "lagrangian", "initial_x"):
            if required not in data:
                raise ConfigError(required, "missing")

        n = _integer(data["n"], "n")
        if n < 1:
            raise ConfigError("n", f"must be >= 1, got {n}")
        structure = data["structure"]
        if structure not in LABELS:
            raise ConfigError("structure", f"expected one of {', '.join(LABELS)}, got {structure!r}")

        lag = data["lagrangian"]
        if not isinstance(lag, dict) or len(lag) != 1 or not ({"builtin", "expression"} & set(lag)):
            raise ConfigError("lagrangian", "expected exactly one of 'builtin' or 'expression'")
        if "builtin" in lag:
            lag = {"builtin": _check_builtin(lag["builtin"], n)}
        elif not isinstance(lag["expression"], str):
            raise ConfigError("lagrangian.expression", "expected a string")

        x0 = data["initial_x"]
        if not isinstance(x0, list):
            raise ConfigError("initial_x", "expected a list of numbers")
        if len(x0) != 8 * n:
            raise ConfigError("initial_x", f"expected {8 * n} values, got {len(x0)}")
        x0 = tuple(_number(v, f"initial_x[{i}]") for i, v in enumerate(x0))

        integrator = data.get("integrator", "rk4")
        if integrator not in METHODS:
            raise ConfigError("integrator", f"expected one of {', '.join(METHODS)}, got {integrator!r}")
        dt = _number(data.get("dt", 1e-3), "dt")
        if not dt > 0:
            raise ConfigError("dt", f"must be > 0, got {dt}")
        steps = _integer(data.get("steps", 1000), "steps")
        if steps < 0:
            raise ConfigError("steps", f"must be >= 0, got {steps}")
        seed = _integer(data.get("rng_seed", 0), "rng_seed")
        return cls(n, structure, lag, x0, integrator, dt, steps, seed)

    def build_lagrangian(self) -> LagrangianField:
        dim = self.dim
        if "builtin" in self.lagrangian:
            b = self.lagrangian["builtin"]
            return BuiltinLagrangian(dim, b["masses"], b["gravity"], b["height_index"])
        return ExpressionLagrangian(self.lagrangian["expression"], dim)


def _check_builtin(spec, n: int) -> dict:
    if not isinstance(spec, dict):
        raise ConfigError("lagrangian.builtin", "expected an object")
    extra = sorted(set(spec) - {"masses", "gravity", "height_index"})
    if extra:
        raise ConfigError(f"lagrangian.builtin.{extra[0]}", "unknown field")
    masses = spec.get("masses", 1.0)
    if isinstance(masses, list):
        if len(masses) != n:
            raise ConfigError("lagrangian.builtin.masses", f"expected {n} values, got {len(masses)}")
        masses = [_number(m, f"lagrangian.builtin.masses[{i}]") for i, m in enumerate(masses)]
    else:
        masses = _number(masses, "lagrangian.builtin.masses")
    gravity = _number(spec.get("gravity", 0.0), "lagrangian.builtin.gravity")
    h = _integer(spec.get("height_index", 0), "lagrangian.builtin.height_index")
    if not 0 <= h < 8 * n:
        raise ConfigError("lagrangian.builtin.height_index", f"must lie in [0, {8 * n}), got {h}")
    return {"masses": masses, "gravity": gravity, "height_index": h}


def load_config(path) -> SystemConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError("<file>", f"cannot read {path}: {err.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("<file>", f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from None
    return SystemConfig.from_dict(data)
