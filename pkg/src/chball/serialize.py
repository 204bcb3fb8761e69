"""JSON encoding shared by the CLI.

Complex scalars are ``[re, im]``, vectors are lists of scalars, matrices are
row-major lists of rows, and a GroupElement is ``{"m": int, "lift": matrix}``.
Inputs are validated against the schema files shipped in ``chball/schemas``.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

from .core import AffineLine, GroupElement
from .maps.polynomial import Polynomial
from .maps.rational import RationalProperMap

SCHEMA_BASE = "https://chball.invalid/schemas/"


class InputError(Exception):
    """Unreadable input, malformed JSON or a schema violation."""


# ---------------------------------------------------------------------------
# encoding


def _float(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def complex_to_json(c) -> list:
    c = complex(c)
    return [_float(c.real), _float(c.imag)]


def array_to_json(a) -> list:
    """Complex arrays become nested [re, im] pairs; real arrays plain lists."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        stacked = np.stack([a.real, a.imag], axis=-1)
        return _clean(stacked.tolist())
    return _clean(a.tolist())


def _clean(obj):
    if isinstance(obj, list):
        return [_clean(o) for o in obj]
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def element_to_json(g: GroupElement) -> dict:
    return {"m": g.m, "lift": array_to_json(g.lift)}


def to_jsonable(obj):
    """Recursively convert results (dataclasses, arrays, enums) to JSON data."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, np.ndarray):
        return array_to_json(obj)
    if isinstance(obj, GroupElement):
        return element_to_json(obj)
    if isinstance(obj, AffineLine):
        return {"base": array_to_json(obj.base), "direction": array_to_json(obj.direction)}
    if isinstance(obj, Polynomial):
        return obj.to_json()
    if isinstance(obj, RationalProperMap):
        return obj.to_json()
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def dumps(obj) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# decoding


def complex_from_json(c) -> complex:
    return complex(float(c[0]), float(c[1]))


def array_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim == 0 or a.shape[-1] != 2:
        raise InputError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def element_from_json(data: dict, tol: float | None = None) -> GroupElement:
    lift = array_from_json(data["lift"])
    if lift.shape != (data["m"] + 1, data["m"] + 1):
        raise InputError(f"lift must be {data['m'] + 1} x {data['m'] + 1}")
    return GroupElement(lift, tol=tol)


# ---------------------------------------------------------------------------
# schemas


@lru_cache(maxsize=None)
def _schema_texts() -> dict[str, dict]:
    out = {}
    for entry in resources.files("chball.schemas").iterdir():
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = json.loads(entry.read_text(encoding="utf-8"))
    return out


def schema_names() -> list[str]:
    return sorted(_schema_texts())


@lru_cache(maxsize=None)
def _registry() -> Registry:
    return Registry().with_resources(
        (SCHEMA_BASE + f"{name}.json", Resource.from_contents(s)) for name, s in _schema_texts().items()
    )


def validator(name: str) -> jsonschema.Draft202012Validator:
    schema = _schema_texts()[name]
    return jsonschema.Draft202012Validator(schema, registry=_registry())


def validate(data, name: str) -> None:
    """Raise InputError if ``data`` violates the schema ``name``."""
    errors = sorted(validator(name).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.path) or "<root>"
        raise InputError(f"{name} schema violation at {where}: {e.message}")


def read_json(path: str | Path, schema: str | None = None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if schema is not None:
        validate(data, schema)
    return data
