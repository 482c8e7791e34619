"""Declarative run configuration: YAML file plus dotted flag overrides.

The schema is a nested key-value tree with defaults below; unknown keys are
rejected before any solve starts. Flag overrides (``--set solver.cfl=0.4``)
win over the file. A short hash of the fully resolved config is embedded in
every output file for provenance.
"""

from __future__ import annotations

import copy
import hashlib
import json

import yaml

from .errors import ConfigError
from .hamiltonian import ControlDisc
from .levelset import SolverOptions
from .mobility import MobilityModel
from .path import PathOptions
from .terrain import TerrainGrid, load_esri_ascii, synth

__all__ = [
    "DEFAULTS",
    "load_config",
    "config_hash",
    "build_grid",
    "build_model",
    "build_disc",
    "build_solver_options",
    "build_path_options",
]

DEFAULTS: dict = {
    "terrain": {
        "file": None,
        "synth": {
            "kind": "flat",
            "nx": 101,
            "ny": 101,
            "dx": 1.0,
            "dy": 1.0,
            "x0": 0.0,
            "y0": 0.0,
            "height": None,      # flat / cliff / saddle amplitude (kind default if unset)
            "sigma": None,       # saddle
            "centers": None,     # saddle: [[x1, y1], [x2, y2]]
            "components": None,  # gaussian_sum: [[h, sigma, [x, y]], ...]
            "center_x": None,    # cliff
            "width": None,       # cliff
            "y_lo": None,
            "y_hi": None,
            "fade": None,
        },
    },
    "mobility": {
        "v_amp": 1.11,
        "v_shift": 2.0,
        "v_denom": 2345.0,
        "pen_center": 1.0,
        "pen_scale": 1.0,
    },
    "controls": {
        "directions": 64,        # M
        "interval_samples": 5,   # K
    },
    "solver": {
        "cfl": 0.5,
        "delta": None,
        "redistance_every": 20,
        "snapshot_every": 1,
        "max_steps": 20000,
    },
    "points": {
        "a": None,
        "b": None,
    },
    "region": {
        "center": None,
        "radius": 10.0,
    },
    "ensemble": {
        "n": 100,
        "k": 2,
        "resample": 51,     # L points per reparametrized path
        "seed": 0,
    },
    "path": {
        "reinit_every": 5,
        "h_step": None,
    },
    "oracle": {
        "stencil": "n16",
    },
    "output": {
        "dir": "out",
        "snapshot_stride": 0,   # 0: no phi snapshot CSVs
    },
}

_SYNTH_KIND_PARAMS = {
    "flat": ("height",),
    "gaussian_sum": ("components",),
    "cliff": ("height", "center_x", "width", "y_lo", "y_hi", "fade"),
    "saddle": ("height", "sigma", "centers"),
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key '{here}'")
        if isinstance(base[key], dict) and not (key == "synth" and val is None):
            if not isinstance(val, dict):
                raise ConfigError(f"'{here}' must be a mapping")
            out[key] = _merge(base[key], val, here)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _apply_override(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"override '{assignment}' is not of the form key.path=value")
    dotted, raw = assignment.split("=", 1)
    keys = dotted.strip().split(".")
    node = cfg
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"unknown config key '{dotted}'")
        node = node[key]
    leaf = keys[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown config key '{dotted}'")
    if isinstance(node[leaf], dict):
        raise ConfigError(f"'{dotted}' is a section, not a value")
    try:
        node[leaf] = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override value '{raw}': {exc}") from exc


def load_config(path=None, overrides=()) -> dict:
    """Resolve defaults + YAML file + dotted overrides (flags win)."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, "r") as f:
                loaded = yaml.safe_load(f) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"bad YAML in {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        cfg = _merge(cfg, loaded)
    for assignment in overrides:
        _apply_override(cfg, assignment)
    return cfg


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def build_grid(cfg: dict) -> TerrainGrid:
    terr = cfg["terrain"]
    if terr.get("file"):
        return load_esri_ascii(terr["file"])
    spec = terr["synth"]
    kind = spec["kind"]
    if kind not in _SYNTH_KIND_PARAMS:
        raise ConfigError(f"unknown synth kind '{kind}'")
    params = {}
    for name in _SYNTH_KIND_PARAMS[kind]:
        val = spec.get(name)
        if val is not None:
            if name == "centers":
                val = tuple(tuple(c) for c in val)
            if name == "components":
                val = [(c[0], c[1], tuple(c[2])) for c in val]
            params[name] = val
    return synth(kind, nx=int(spec["nx"]), ny=int(spec["ny"]),
                 dx=float(spec["dx"]), dy=float(spec["dy"]),
                 origin=(float(spec["x0"]), float(spec["y0"])), **params)


def build_model(cfg: dict) -> MobilityModel:
    return MobilityModel(**{k: float(v) for k, v in cfg["mobility"].items()})


def build_disc(cfg: dict) -> ControlDisc:
    c = cfg["controls"]
    return ControlDisc(M=int(c["directions"]), K=int(c["interval_samples"]))


def build_solver_options(cfg: dict) -> SolverOptions:
    s = cfg["solver"]
    return SolverOptions(
        cfl=float(s["cfl"]),
        redistance_every=int(s["redistance_every"]),
        snapshot_every=int(s["snapshot_every"]),
        max_steps=int(s["max_steps"]),
    )


def build_path_options(cfg: dict) -> PathOptions:
    p = cfg["path"]
    return PathOptions(
        h_step=None if p["h_step"] is None else float(p["h_step"]),
        reinit_every=None if p["reinit_every"] in (None, 0) else int(p["reinit_every"]),
    )


def require_point(cfg: dict, name: str):
    val = cfg["points"].get(name)
    if val is None:
        raise ConfigError(f"points.{name} is required for this command")
    if len(val) != 2:
        raise ConfigError(f"points.{name} must be [x, y]")
    return (float(val[0]), float(val[1]))
