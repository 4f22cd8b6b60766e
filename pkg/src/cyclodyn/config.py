"""JSON system configuration: field order, dimension, named maps, caps.

Schema (all sizes positive integers unless noted):

    {
      "n": 4,                          // cyclotomic order (1 = Q)
      "N": 1,                          // affine dimension
      "maps": [{"name": "f", "components": ["X1^2 - 1"]}, ...],
      "precision": 256,                // optional, bits
      "tolerance": 1e-8,               // optional
      "seed": 1,                       // optional
      "caps": {                        // optional, any subset
        "depth": 8, "words": 20000, "points": 200000,
        "box_num": 3, "box_den": 3, "coeff_bound": 1
      }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .morphisms import AffineMorphism
from .parsing import PolyParseError, parse_polynomial


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


_DEFAULT_CAPS = {
    "depth": 8,
    "words": 20_000,
    "points": 200_000,
    "box_num": 3,
    "box_den": 3,
    "coeff_bound": 1,
}


@dataclass
class SystemConfig:
    order: int
    dim: int
    map_sources: dict[str, list[str]]
    maps: dict[str, AffineMorphism]
    precision: int = 256
    tolerance: float = 1e-8
    seed: int = 1
    caps: dict[str, int] = field(default_factory=lambda: dict(_DEFAULT_CAPS))

    def to_json_dict(self) -> dict:
        return {
            "n": self.order,
            "N": self.dim,
            "maps": [
                {"name": name, "components": list(comps)}
                for name, comps in self.map_sources.items()
            ],
            "precision": self.precision,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "caps": dict(self.caps),
        }

    def emit(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def parse_config(text: str) -> SystemConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from e
    _require(isinstance(raw, dict), "top level must be an object")
    for key in ("n", "N", "maps"):
        _require(key in raw, f"missing required key {key!r}")
    order, dim = raw["n"], raw["N"]
    _require(isinstance(order, int) and order >= 1, "'n' must be a positive integer")
    _require(isinstance(dim, int) and dim >= 1, "'N' must be a positive integer")
    _require(isinstance(raw["maps"], list) and raw["maps"], "'maps' must be a nonempty list")
    precision = raw.get("precision", 256)
    _require(isinstance(precision, int) and precision >= 8, "'precision' must be an integer >= 8")
    tolerance = raw.get("tolerance", 1e-8)
    _require(isinstance(tolerance, (int, float)) and tolerance > 0, "'tolerance' must be positive")
    seed = raw.get("seed", 1)
    _require(isinstance(seed, int), "'seed' must be an integer")
    caps = dict(_DEFAULT_CAPS)
    for k, v in (raw.get("caps") or {}).items():
        _require(k in _DEFAULT_CAPS, f"unknown cap {k!r}")
        _require(isinstance(v, int) and v >= 0, f"cap {k!r} must be a non-negative integer")
        caps[k] = v
    sources: dict[str, list[str]] = {}
    maps: dict[str, AffineMorphism] = {}
    for entry in raw["maps"]:
        _require(isinstance(entry, dict), "each map must be an object")
        _require("name" in entry and "components" in entry, "maps need 'name' and 'components'")
        name = entry["name"]
        comps = entry["components"]
        _require(isinstance(name, str) and name, "map names must be nonempty strings")
        _require(name not in maps, f"duplicate map name {name!r}")
        _require(
            isinstance(comps, list) and len(comps) == dim,
            f"map {name!r} needs exactly N={dim} components",
        )
        polys = []
        for idx, src in enumerate(comps):
            _require(isinstance(src, str), f"map {name!r} component {idx + 1} must be a string")
            try:
                polys.append(parse_polynomial(src, dim, order))
            except PolyParseError as e:
                raise ConfigError(
                    f"map {name!r} component {idx + 1}: {e}",
                ) from e
        sources[name] = list(comps)
        maps[name] = AffineMorphism(polys)
    cfg = SystemConfig(order, dim, sources, maps, precision, float(tolerance), seed, caps)
    return cfg
