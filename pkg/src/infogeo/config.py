"""Run configuration: defaults, schema validation, canonical JSON.

A config is plain JSON data. Missing sections and missing keys inside a
section fall back to defaults; unknown sections or keys are rejected.
Parsing then emitting the canonical form is the identity on validated
configs, which is what makes byte-identical reruns possible.
"""

from __future__ import annotations

import copy
import json

import jsonschema

DEFAULT_CONFIG = {
    "version": 1,
    "model": {"name": "linear", "params": {"F_coef": -1.0, "sigma": 1.0, "H_coef": 1.0}},
    "measure": {"t": 1.0, "variant": "smooth"},
    "grid": {"L": 10.0, "n": 801},
    "space": {"kind": "mixed", "k": 2, "lambda0": 2.0, "lambda1": 2.0},
    "basis": {"name": "poly_plus_bump", "m": 4},
    "time": {"T": 2.0, "dt": 1e-4, "dt_sim": 1e-4},
    "prior": {"mean": 0.0, "var": 0.5},
    "geometry": {
        "points": [{"kind": "constant", "value": 2.0},
                   {"kind": "constant", "value": 1.0}],
    },
    "counterexample": {"k": 2, "lambda": 2.0, "t": 1.0, "m": 2, "terms": 30,
                       "zeta1": -1.0, "zeta2": -0.1, "local_nodes": 2001},
}

_POINT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "constant"},
                           "value": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["kind", "value"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "gaussian"},
                           "mean": {"type": "number"},
                           "var": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["kind", "mean", "var"],
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"const": 1},
        "model": {
            "type": "object",
            "properties": {
                "name": {"enum": ["linear", "double_well", "cubic_sensor"]},
                "params": {"type": "object",
                           "additionalProperties": {"type": "number"}},
            },
            "required": ["name"],
            "additionalProperties": False,
        },
        "measure": {
            "type": "object",
            "properties": {
                "t": {"type": "number", "exclusiveMinimum": 0, "maximum": 2},
                "variant": {"enum": ["simple", "smooth"]},
            },
            "required": ["t", "variant"],
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "L": {"type": "number", "exclusiveMinimum": 0},
                "n": {"type": "integer", "minimum": 11},
            },
            "required": ["L", "n"],
            "additionalProperties": False,
        },
        "space": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["mixed", "fixed", "hilbert", "low_order", "split"]},
                "k": {"type": "integer", "minimum": 1, "maximum": 4},
                "lambda0": {"type": "number", "minimum": 1},
                "lambda1": {"type": "number", "minimum": 1},
            },
            "required": ["kind", "k"],
            "additionalProperties": False,
        },
        "basis": {
            "type": "object",
            "properties": {
                "name": {"enum": ["polynomial", "poly_plus_bump", "nodal"]},
                "m": {"type": "integer", "minimum": 1, "maximum": 64},
            },
            "required": ["name", "m"],
            "additionalProperties": False,
        },
        "time": {
            "type": "object",
            "properties": {
                "T": {"type": "number", "exclusiveMinimum": 0},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "dt_sim": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-3},
            },
            "required": ["T", "dt", "dt_sim"],
            "additionalProperties": False,
        },
        "prior": {
            "type": "object",
            "properties": {
                "mean": {"type": "number"},
                "var": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["mean", "var"],
            "additionalProperties": False,
        },
        "geometry": {
            "type": "object",
            "properties": {
                "points": {"type": "array", "items": _POINT_SCHEMA,
                           "minItems": 2, "maxItems": 3},
            },
            "required": ["points"],
            "additionalProperties": False,
        },
        "counterexample": {
            "type": "object",
            "properties": {
                "k": {"type": "integer", "minimum": 2, "maximum": 3},
                "lambda": {"type": "number", "minimum": 1},
                "t": {"type": "number", "exclusiveMinimum": 0, "maximum": 2},
                "m": {"type": "integer", "minimum": 2},
                "terms": {"type": "integer", "minimum": 2},
                "zeta1": {"type": "number"},
                "zeta2": {"type": "number"},
                "local_nodes": {"type": "integer", "minimum": 201},
                "override_exponent": {"type": "integer", "minimum": 1, "maximum": 6},
            },
            "additionalProperties": False,
        },
    },
    "required": ["version", "model", "measure", "grid", "space", "basis",
                 "time", "prior"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def default_config() -> dict:
    return copy.deepcopy(DEFAULT_CONFIG)


def _merge_section(user: dict, default: dict) -> dict:
    merged = copy.deepcopy(default)
    merged.update(copy.deepcopy(user))
    return merged


def apply_defaults(cfg: dict) -> dict:
    """Fill missing sections and keys; reject non-object sections early."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"config must be an object, got {type(cfg).__name__}")
    out = {}
    for key, default in DEFAULT_CONFIG.items():
        if key not in cfg:
            out[key] = copy.deepcopy(default)
            continue
        user = cfg[key]
        if not isinstance(default, dict):
            out[key] = user
        elif not isinstance(user, dict):
            raise ConfigError(f"section {key!r} must be an object")
        elif key == "model":
            # params only inherit defaults when the model itself is unchanged
            name = user.get("name", default["name"])
            if name == default["name"]:
                params = _merge_section(user.get("params", {}), default["params"])
            else:
                params = copy.deepcopy(user.get("params", {}))
            out[key] = {"name": name, "params": params}
        elif key == "geometry":
            out[key] = copy.deepcopy(user)
        else:
            out[key] = _merge_section(user, default)
    for key in cfg:
        if key not in DEFAULT_CONFIG:
            raise ConfigError(f"unknown config section {key!r}")
    return out


def validate_config(cfg: dict) -> dict:
    """Apply defaults, check the schema, then cross-field constraints."""
    full = apply_defaults(cfg)
    try:
        jsonschema.validate(full, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"at {path}: {exc.message}") from exc

    space = full["space"]
    k = space["k"]
    lam0 = space.get("lambda0", 2.0)
    lam1 = space.get("lambda1", lam0)
    if space["kind"] == "mixed":
        if lam1 > lam0:
            raise ConfigError("space: lambda1 must not exceed lambda0")
        if lam1 < k:
            raise ConfigError("space: the mixed ladder needs lambda1 >= k")
    if k > 2 and lam1 < 2 * k:
        raise ConfigError("space: projection order above 2 needs lambda1 >= 2k")
    if full["grid"]["n"] % 2 == 0:
        raise ConfigError("grid: node count must be odd")

    time = full["time"]
    ratio = time["dt"] / time["dt_sim"]
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
        raise ConfigError("time: dt must be a positive integer multiple of dt_sim")
    steps = time["T"] / time["dt"]
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ConfigError("time: T must be an integer multiple of dt")

    ce = full["counterexample"]
    if not ce["zeta1"] < ce["zeta2"]:
        raise ConfigError("counterexample: window endpoints must be increasing")
    return full


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(raw)


def canonical_json(cfg: dict) -> str:
    """Stable serialization; validated configs round-trip through it."""
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"), allow_nan=False)
