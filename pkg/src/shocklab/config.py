"""Experiment configuration: defaults, JSON loading, validation, overrides.

One JSON file describes a full experiment (gas, shock end states, wall
distance, perturbation, grids, horizons, output layout).  Every key except
the shock end states has a documented default; v_plus and u_plus define
the experiment and must be given.  The bundled reference file is exactly
`serialize(reference_raw())`.
"""

import copy
import json

import numpy as np

from .errors import ConfigError
from .gas import GasParams
from .periodic import PerturbationSpec

# ---- defaults ----------------------------------------------------------------

DEFAULTS = {
    "gas": {"a": 1.0, "gamma": 1.4, "alpha": 0.0},
    "shock": {"v_plus": None, "u_plus": None},  # required, no default
    "beta1": 15.0,
    "perturbation": {
        "period": 6.283185307179586,
        "eps": 0.01,
        "zeta_modes": [[1, 1.0, 0.0]],
        "phi_modes": [[1, 0.0, 0.45]],
    },
    "grid": {
        "dx": 0.02,
        "length": None,  # half-width; None -> sized from shock span and t_end
        "n_cells": 314,  # far-field cells of the line run (near-commensurate)
        "shift_cells": 512,  # background cells of the shift/calibration run
    },
    "time": {
        "t_end": 60.0,
        "snapshots": 25,
        "snapshot_times": None,  # explicit list overrides the count
        "shift_h": 0.02,  # shift-ODE step = background store interval
        "decay_store": 0.5,  # store interval of the standalone decay run
    },
    "mode": "mirrored",
    "cfl": 0.4,
    "out_dir": "out",
    "sweep": None,  # {"key": dotted path, "values": [...], "task": name}
}

SWEEP_TASKS = ("hugoniot", "profile", "periodic", "shift", "evolve", "verify")


def default_raw():
    """Deep copy of the documented defaults."""
    return copy.deepcopy(DEFAULTS)


def reference_raw():
    """Defaults completed with the reference shock (gamma = 1.4, v_plus = 2,
    unit-amplitude end states, so v_minus = 1 exactly)."""
    raw = default_raw()
    raw["shock"]["v_plus"] = 2.0
    raw["shock"]["u_plus"] = -0.7880804897803273
    return raw


def serialize(raw):
    """Canonical JSON text of a raw configuration (deterministic)."""
    return json.dumps(raw, indent=2, sort_keys=True) + "\n"


# ---- loading and overrides -----------------------------------------------


def _merge(base, update, path=""):
    for key, value in update.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"{where}: unknown configuration key")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _merge(base[key], value, where + ".")
        else:
            base[key] = value
    return base


def apply_override(raw, text):
    """Apply one KEY=VALUE override; VALUE is parsed as JSON when possible."""
    key, sep, value_text = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"override '{text}' is not of the form KEY=VALUE")
    try:
        value = json.loads(value_text)
    except json.JSONDecodeError:
        value = value_text  # bare strings (e.g. mode=wall) stay strings
    node = raw
    parts = key.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"{key}: unknown configuration key")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(f"{key}: unknown configuration key")
    node[parts[-1]] = value
    return raw


def load_raw(path=None, overrides=()):
    """Defaults, overlaid with the JSON file at ``path``, then overrides."""
    raw = default_raw()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        _merge(raw, user)
    for text in overrides:
        apply_override(raw, text)
    return raw


# ---- validation ---------------------------------------------------------


def _number(errors, raw, key, cond, what, allow_none=False):
    node = raw
    for part in key.split("."):
        node = node[part]
    if node is None and allow_none:
        return None
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        errors.append(f"{key}: expected a number, got {node!r}")
        return None
    if not cond(node):
        errors.append(f"{key}: {what} (got {node!r})")
    return node


def _check_modes(errors, raw, key):
    modes = raw["perturbation"][key.split(".")[-1]]
    if not isinstance(modes, (list, tuple)):
        errors.append(f"{key}: expected a list of [k, cos_amp, sin_amp] rows")
        return
    for i, row in enumerate(modes):
        ok = (
            isinstance(row, (list, tuple))
            and len(row) == 3
            and isinstance(row[0], int)
            and row[0] >= 1
            and all(isinstance(a, (int, float)) for a in row[1:])
        )
        if not ok:
            errors.append(f"{key}[{i}]: expected [k >= 1, cos_amp, sin_amp]")


def validate(raw):
    """Field-level error messages for a raw configuration (empty if valid)."""
    errors = []
    _number(errors, raw, "gas.a", lambda x: x > 0, "must be positive")
    _number(errors, raw, "gas.gamma", lambda x: x >= 1, "must be >= 1")
    _number(errors, raw, "gas.alpha", lambda x: x >= 0, "must be >= 0")
    for key in ("shock.v_plus", "shock.u_plus"):
        if raw["shock"][key.split(".")[-1]] is None:
            errors.append(f"{key}: required (defines the experiment, no default)")
    _number(errors, raw, "shock.v_plus", lambda x: x > 0, "must be positive",
            allow_none=True)
    _number(errors, raw, "shock.u_plus", lambda x: x < 0, "must be negative",
            allow_none=True)
    _number(errors, raw, "beta1", lambda x: x > 0, "must be positive")
    _number(errors, raw, "perturbation.period", lambda x: x > 0, "must be positive")
    _number(errors, raw, "perturbation.eps", lambda x: x >= 0, "must be >= 0")
    _check_modes(errors, raw, "perturbation.zeta_modes")
    _check_modes(errors, raw, "perturbation.phi_modes")
    _number(errors, raw, "grid.dx", lambda x: x > 0, "must be positive")
    _number(errors, raw, "grid.length", lambda x: x > 0, "must be positive",
            allow_none=True)
    for key in ("grid.n_cells", "grid.shift_cells"):
        n = _number(errors, raw, key, lambda x: x >= 8, "must be >= 8")
        if n is not None and not isinstance(n, int):
            errors.append(f"{key}: expected an integer, got {n!r}")
    t_end = _number(errors, raw, "time.t_end", lambda x: x > 0, "must be positive")
    _number(errors, raw, "time.snapshots", lambda x: x >= 2 and x == int(x),
            "must be an integer >= 2")
    _number(errors, raw, "time.shift_h", lambda x: x > 0, "must be positive")
    _number(errors, raw, "time.decay_store", lambda x: x > 0, "must be positive")
    times = raw["time"]["snapshot_times"]
    if times is not None:
        ok = (
            isinstance(times, (list, tuple))
            and len(times) >= 1
            and all(isinstance(t, (int, float)) for t in times)
        )
        if not ok:
            errors.append("time.snapshot_times: expected a list of numbers")
        elif t_end is not None:
            arr = np.asarray(times, dtype=float)
            if np.any(np.diff(arr) <= 0):
                errors.append("time.snapshot_times: must be strictly increasing")
            if arr[0] < 0 or arr[-1] > t_end:
                errors.append("time.snapshot_times: must lie within [0, t_end]")
    if raw["mode"] not in ("mirrored", "wall"):
        errors.append(f"mode: must be 'mirrored' or 'wall' (got {raw['mode']!r})")
    _number(errors, raw, "cfl", lambda x: 0 < x <= 0.9, "must be in (0, 0.9]")
    if not isinstance(raw["out_dir"], str) or not raw["out_dir"]:
        errors.append("out_dir: expected a non-empty string")
    sweep = raw["sweep"]
    if sweep is not None:
        if not isinstance(sweep, dict):
            errors.append("sweep: expected an object with key/values/task")
        else:
            for need in ("key", "values", "task"):
                if need not in sweep:
                    errors.append(f"sweep.{need}: required")
            if sweep.get("task") not in (None,) + SWEEP_TASKS:
                errors.append(
                    f"sweep.task: must be one of {', '.join(SWEEP_TASKS)}"
                )
            values = sweep.get("values")
            if values is not None and (
                not isinstance(values, list) or len(values) == 0
            ):
                errors.append("sweep.values: expected a non-empty list")
    return errors


# ---- resolved configuration ----------------------------------------------


class ExperimentConfig:
    """Validated configuration with module-level objects resolved."""

    def __init__(self, raw):
        errors = validate(raw)
        if errors:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
        self.raw = raw
        try:
            self.gas = GasParams(
                a=float(raw["gas"]["a"]),
                gamma=float(raw["gas"]["gamma"]),
                alpha=float(raw["gas"]["alpha"]),
            )
        except ValueError as exc:
            raise ConfigError(f"gas: {exc}") from exc
        self.v_plus = float(raw["shock"]["v_plus"])
        self.u_plus = float(raw["shock"]["u_plus"])
        self.beta1 = float(raw["beta1"])
        pert = raw["perturbation"]
        try:
            self.spec = PerturbationSpec(
                period=float(pert["period"]),
                eps=float(pert["eps"]),
                zeta_modes=tuple(tuple(row) for row in pert["zeta_modes"]),
                phi_modes=tuple(tuple(row) for row in pert["phi_modes"]),
            )
        except ValueError as exc:
            raise ConfigError(f"perturbation: {exc}") from exc
        grid = raw["grid"]
        self.dx = float(grid["dx"])
        self.length = None if grid["length"] is None else float(grid["length"])
        self.n_cells = int(grid["n_cells"])
        self.shift_cells = int(grid["shift_cells"])
        time = raw["time"]
        self.t_end = float(time["t_end"])
        self.shift_h = float(time["shift_h"])
        self.decay_store = float(time["decay_store"])
        if time["snapshot_times"] is not None:
            self.snapshot_times = np.asarray(time["snapshot_times"], dtype=float)
        else:
            self.snapshot_times = np.linspace(0.0, self.t_end, int(time["snapshots"]))
        self.mode = raw["mode"]
        self.cfl = float(raw["cfl"])
        self.out_dir = raw["out_dir"]
        self.sweep = raw["sweep"]


def load_config(path=None, overrides=()):
    """Load, override, validate; raises ConfigError with field messages."""
    return ExperimentConfig(load_raw(path, overrides))
