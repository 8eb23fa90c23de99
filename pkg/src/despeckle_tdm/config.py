"""Flat ``key = value`` run configuration and benchmark suite files."""
from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diffusivity import DiffusivityConfig
from .solvers import SolverConfig


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


DIFFUSIVITY_KEYS = ("epsilon", "nu", "K", "exponent", "p0", "alpha", "k", "xi", "sigma")
SOLVER_KEYS = ("model", "gamma", "tau", "theta1", "theta2", "stop", "eps_stop", "max_steps",
               "patience", "gs_tol", "gs_max_sweeps", "cfl_enforce")
RUN_KEYS = SOLVER_KEYS + DIFFUSIVITY_KEYS

_TYPES = {f.name: f.type for cls in (DiffusivityConfig, SolverConfig) for f in fields(cls)}


def _coerce(key: str, value: Any) -> Any:
    kind = _TYPES[key]
    if "bool" in kind:
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", key)
        return value
    if "str" in kind:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key)
    if "int" in kind:
        if int(value) != value:
            raise ConfigError(f"expected an integer, got {value!r}", key)
        return int(value)
    return float(value)


def build_configs(values: dict) -> tuple[DiffusivityConfig, SolverConfig]:
    """Split a flat mapping into diffusivity and solver configs, validating every key."""
    dkw, skw = {}, {}
    for key, value in values.items():
        if key in DIFFUSIVITY_KEYS:
            dkw[key] = _coerce(key, value)
        elif key in SOLVER_KEYS:
            skw[key] = _coerce(key, value)
        else:
            raise ConfigError("unknown configuration key", key)
    try:
        dcfg = DiffusivityConfig(**dkw)
    except ValueError as exc:
        raise ConfigError(str(exc), _blame(str(exc), dkw)) from None
    try:
        scfg = SolverConfig(**skw)
    except ValueError as exc:
        raise ConfigError(str(exc), _blame(str(exc), skw)) from None
    return dcfg, scfg


def _blame(message: str, given: dict) -> str | None:
    # Validation messages start with the offending field name.
    first = message.split()[0].rstrip(",") if message else ""
    if first == "theta":
        return "theta1" if "theta1" in given else "theta2"
    return first if first in RUN_KEYS else None


def parse_run_config(text: str) -> tuple[DiffusivityConfig, SolverConfig]:
    try:
        values = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    for key, value in values.items():
        if isinstance(value, (dict, list)):
            raise ConfigError("tables and arrays are not allowed in a run config", key)
    return build_configs(values)


def load_run_config(path) -> tuple[DiffusivityConfig, SolverConfig]:
    return parse_run_config(Path(path).read_text())


# ---------------------------------------------------------------------------
# Benchmark suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchCase:
    label: str
    method: str
    phantom: str
    looks: int
    seed: int
    width: int
    height: int
    dcfg: DiffusivityConfig
    scfg: SolverConfig


_CASE_KEYS = ("label", "method", "phantom", "looks", "seed", "width", "height")


def parse_suite(text: str) -> list[BenchCase]:
    """Expand a suite file into cases.

    Top-level ``phantoms``, ``looks`` and ``seeds`` lists are crossed with every
    ``[methods.<NAME>]`` table. Explicit ``[[case]]`` entries are appended
    after the grid. ``[defaults]`` supplies run keys shared by all methods.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    allowed = {"width", "height", "phantoms", "looks", "seeds", "defaults", "methods", "case"}
    for key in doc:
        if key not in allowed:
            raise ConfigError("unknown suite key", key)
    width = int(doc.get("width", 128))
    height = int(doc.get("height", width))
    defaults = doc.get("defaults", {})
    methods = doc.get("methods", {})
    cases = []
    for phantom in doc.get("phantoms", []):
        for looks in doc.get("looks", []):
            for name, overrides in methods.items():
                dcfg, scfg = build_configs({**defaults, **overrides})
                for seed in doc.get("seeds", []):
                    label = f"{name}-{phantom}-L{looks}-s{seed}"
                    cases.append(BenchCase(label, name, phantom, int(looks), int(seed),
                                           width, height, dcfg, scfg))
    for entry in doc.get("case", []):
        entry = dict(entry)
        meta = {k: entry.pop(k) for k in _CASE_KEYS if k in entry}
        method = meta.get("method", "custom")
        run_keys = {**defaults, **methods.get(method, {}), **entry}
        dcfg, scfg = build_configs(run_keys)
        for required in ("phantom", "looks", "seed"):
            if required not in meta:
                raise ConfigError("missing in [[case]] entry", required)
        label = meta.get("label", f"{method}-{meta['phantom']}-L{meta['looks']}-s{meta['seed']}")
        cases.append(BenchCase(label, method, meta["phantom"], int(meta["looks"]), int(meta["seed"]),
                               int(meta.get("width", width)), int(meta.get("height", height)),
                               dcfg, scfg))
    labels = [c.label for c in cases]
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        raise ConfigError(f"duplicate case labels {dupes}", "label")
    return cases


def load_suite(path) -> list[BenchCase]:
    return parse_suite(Path(path).read_text())


def default_suite_path() -> Path:
    return Path(__file__).with_name("suites") / "default.toml"
