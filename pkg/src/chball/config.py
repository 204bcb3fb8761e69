"""Tolerances and run configuration.

The config file format is plain ``key = value`` lines (UTF-8, ``#`` starts a
comment).  Keys are the field names of :class:`Config`, e.g.::

    seed = 7
    tol_group = 1e-10
    word_budget = 2000000
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Config:
    # core geometry
    tol_group: float = 1e-10
    tol_bdry: float = 1e-9
    tol_line: float = 1e-9
    tol_denom: float = 1e-12
    # spectral
    tol_class: float = 1e-8
    tol_cluster: float = 1e-4
    max_iter: int = 20000
    # dynamics
    rate_tol: float = 0.02
    # subgroups
    tol_rank: float = 1e-8
    tol_poly: float = 1e-8
    tol_dedup: float = 1e-9
    word_budget: int = 2_000_000
    # proper maps
    tol_sym: float = 1e-8
    tol_proper: float = 1e-9
    tol_det: float = 1e-6
    tol_ftag: float = 1e-8
    # siegel
    tol_u: float = 1e-3
    # run parameters
    seed: int = 0
    n_samples: int = 200
    word_length: int = 2

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name.startswith("tol") or f.name == "rate_tol":
                if not getattr(self, f.name) > 0:
                    raise ValueError(f"{f.name} must be positive")

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)


DEFAULT = Config()


def _coerce(field: dataclasses.Field, raw: str):
    if field.type in ("int", int):
        return int(raw)
    return float(raw)


def parse_config_text(text: str, base: Config = DEFAULT) -> Config:
    fields = {f.name: f for f in dataclasses.fields(Config)}
    changes = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in fields:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        changes[key] = _coerce(fields[key], raw)
    return base.replace(**changes)


def load_config(path: str | Path, base: Config = DEFAULT) -> Config:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base)
