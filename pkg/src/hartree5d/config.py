"""JSON run-configuration schema: strict validation with defaults.

A config is a single JSON object with an explicit ``schema_version``.
Unknown keys anywhere are hard errors, because a silently ignored typo in a
tolerance or radius is the main operator hazard.  Every other key has a
default, so ``{"schema_version": 1}`` is a complete config.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

SCHEMA_VERSION = 1


class ConfigError(Exception):
    """Invalid configuration; the CLI maps this to exit code 1."""


_REQUIRED = object()


@dataclass(frozen=True)
class _Leaf:
    kind: str
    default: object = _REQUIRED


SCHEMA = {
    "schema_version": _Leaf("int"),
    "grid": {
        "n": _Leaf("int", 2048),
        "r_max": _Leaf("float", 30.0),
    },
    "potential": {
        "family": _Leaf("str", "zero"),
        "a": _Leaf("float", 0.0),
        "b": _Leaf("float", 1.0),
        "p": _Leaf("float", 2.0),
        "r": _Leaf("float_list", ()),
        "v": _Leaf("float_list", ()),
    },
    "groundstate": {
        "tol": _Leaf("float", 1e-10),
        "max_iter": _Leaf("int", 400),
        "init_amp": _Leaf("float", 3.0),
    },
    "evolve": {
        "dt": _Leaf("float", 1e-3),
        "t_end": _Leaf("float", 1.0),
        "output_every": _Leaf("int", 10),
        "caps": {
            "blowup_grad_factor": _Leaf("float", 10.0),
            "blowup_sup_cap": _Leaf("float", 1e6),
            "phase_cap": _Leaf("float", 0.1),
        },
        "local_mass_radius": _Leaf("float", 5.0),
        "morawetz_radius": _Leaf("opt_float", None),
        "groundstate_dir": _Leaf("opt_str", None),
        "u0": {
            "kind": _Leaf("str", "scaled_Q"),
            "c": _Leaf("float", 0.9),
            "amp": _Leaf("float", 1.0),
            "width": _Leaf("float", 1.0),
        },
    },
    "verify": {
        "dt": _Leaf("float", 1e-3),
        "t_end": _Leaf("float", 1.0),
        "output_every": _Leaf("int", 5),
        "probe_radii": _Leaf(
            "float_list", (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0)
        ),
        "n_fields": _Leaf("int", 100),
        "seed": _Leaf("int", 20260809),
    },
}


def _check_leaf(leaf: _Leaf, value, path: str):
    kind = leaf.kind
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if kind == "opt_float":
        if value is None:
            return None
        return _check_leaf(_Leaf("float"), value, path)
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if kind == "opt_str":
        if value is None:
            return None
        return _check_leaf(_Leaf("str"), value, path)
    if kind == "float_list":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list of numbers, got {value!r}")
        out = []
        for i, x in enumerate(value):
            out.append(_check_leaf(_Leaf("float"), x, f"{path}[{i}]"))
        return tuple(out)
    raise AssertionError(f"unhandled leaf kind {kind}")


def _walk(schema: dict, node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {node!r}")
    for key in node:
        if key not in schema:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key: {where}")
    out = {}
    for key, spec in schema.items():
        where = f"{path}.{key}" if path else key
        if isinstance(spec, dict):
            out[key] = _walk(spec, node.get(key, {}), where)
        else:
            if key in node:
                out[key] = _check_leaf(spec, node[key], where)
            elif spec.default is _REQUIRED:
                raise ConfigError(f"missing required config key: {where}")
            else:
                out[key] = copy.deepcopy(spec.default)
    return out


def validate_config(raw: dict) -> dict:
    """Validate a parsed JSON object and fill defaults.

    Returns the normalized config dict; the optional top-level ``sweep``
    section is validated structurally here and its per-run overrides are
    merged and re-validated by the CLI.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw = dict(raw)
    sweep = raw.pop("sweep", None)
    cfg = _walk(SCHEMA, raw, "")
    if cfg["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {cfg['schema_version']} "
            f"(this build reads version {SCHEMA_VERSION})"
        )
    if sweep is not None:
        cfg["sweep"] = _validate_sweep(sweep)
    return cfg


def _validate_sweep(sweep) -> dict:
    if not isinstance(sweep, dict):
        raise ConfigError("sweep: expected an object")
    for key in sweep:
        if key not in ("runs", "parallel"):
            raise ConfigError(f"unknown config key: sweep.{key}")
    runs = sweep.get("runs")
    if not isinstance(runs, list) or not runs:
        raise ConfigError("sweep.runs: expected a non-empty list of override objects")
    for i, run in enumerate(runs):
        if not isinstance(run, dict):
            raise ConfigError(f"sweep.runs[{i}]: expected an object")
    parallel = sweep.get("parallel", 1)
    parallel = _check_leaf(_Leaf("int"), parallel, "sweep.parallel")
    if parallel < 1:
        raise ConfigError("sweep.parallel must be >= 1")
    return {"runs": runs, "parallel": parallel}


def merge_override(base: dict, override: dict, path: str = "") -> dict:
    """Recursive merge of a sweep override into a base config dict."""
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}.{key}" if path else key
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = merge_override(out[key], val, where)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path) -> dict:
    """Read, parse, and validate a JSON config file."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"config parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err
    return validate_config(raw)
