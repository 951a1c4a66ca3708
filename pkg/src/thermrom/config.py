"""Flat key=value configuration files (INI sections) for the harness.

A file holds one ``[run]`` section plus optional per-scenario sections whose
keys override the run section when that scenario is selected::

    [run]
    scenario = curved-nonlinear
    eps = 1e-3
    seed = 2024

    [curved-nonlinear]
    cycles = 500
    pulse_height = 40

Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import configparser
import dataclasses
from pathlib import Path

from .errors import ConfigError
from .scenarios import ScenarioConfig

__all__ = ["load_config", "example_config_text", "config_field_names"]

_BOOL_TRUE = ("1", "true", "yes", "on")
_BOOL_FALSE = ("0", "false", "no", "off")


def config_field_names():
    return tuple(f.name for f in dataclasses.fields(ScenarioConfig))


def _convert(name, raw, target_type):
    raw = raw.strip()
    if raw.lower() == "none":
        return None
    if target_type is bool:
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ConfigError(f"key {name!r}: cannot parse boolean from {raw!r}")
    if target_type is int:
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key {name!r}: cannot parse integer from {raw!r}") from exc
    if target_type is float:
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {name!r}: cannot parse number from {raw!r}") from exc
    if name == "modal_subset" and "," in raw:
        return tuple(int(tok) for tok in raw.split(","))
    return raw


_FIELD_TYPES = {
    "scenario": str, "eps": float, "cycles": int, "steps_per_cycle": int,
    "seed": int, "method": str, "basis_size": int, "out_dir": str,
    "save_states": bool, "n_elements": int, "pulse_height": float,
    "pulse_width_fraction": float, "damping_modulus": float,
    "db_points": int, "k_modes": int,
    "modal_subset": str, "modal_rank_tol": float, "newton_tol": float,
    "max_newton": int, "damping_cross_factor": float,
    "include_equilibrium_drift": bool,
}


def load_config(path, overrides=None):
    """Read a configuration file into a :class:`ScenarioConfig`.

    ``overrides`` (a dict) wins over the file; per-scenario sections win
    over ``[run]``.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file {path} does not exist")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    values = {}

    def apply_section(section):
        for key, raw in parser.items(section):
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown configuration key {key!r} in [{section}]")
            values[key] = _convert(key, raw, _FIELD_TYPES[key])

    if parser.has_section("run"):
        apply_section("run")
    scenario = (overrides or {}).get("scenario") or values.get("scenario")
    if scenario and parser.has_section(scenario):
        apply_section(scenario)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def example_config_text():
    return """\
# thermrom run configuration (key = value, sections per scenario)
[run]
scenario = curved-nonlinear
eps = 1e-3
seed = 2024
method = mms-o1
steps_per_cycle = 50
# cycles = 500          # default: scenario thermal span / (2*pi*eps)
# basis_size = 20       # default: database basis size
# out_dir = runs/demo
save_states = false

# beam and pulse parameters
n_elements = 60
# pulse_height = 400          # default: per-scenario (40 / 40 / 400 K)
# pulse_width_fraction = 0.1  # default: per-scenario (0.2 / 0.2 / 0.1)
# damping_modulus = 1e6       # default: per-scenario (1e8 linear-straight,
#                             # 1e6 curved)
db_points = 19
k_modes = 5
# modal_subset = preset  # or "random", or 1-based indices like 4,7,13
modal_rank_tol = 1e-4

# integrator and slow-correction flags
newton_tol = 1e-8
max_newton = 25
damping_cross_factor = 1
include_equilibrium_drift = true

[curved-nonlinear]
# scenario-specific overrides go here

[straight-linear]
eps = 1e-2
"""
