"""Terrain-aware optimal walking paths.

Solves a level-set front-propagation problem whose Hamiltonian maximizes
slope-dependent walking speed over the travel direction, extracts minimal
time paths by backward characteristics, and clusters path ensembles from
uncertain start regions into representative routes.
"""

from .ensemble import EnsembleResult, StartRegion, run_ensemble
from .hamiltonian import ControlDisc
from .levelset import ArrivalField, LevelSetRun, SolverOptions, init_run, run_until_point, run_until_region
from .mobility import MobilityModel
from .path import PathOptions, PathTrace, extract_path, path_length_time
from .terrain import TerrainGrid, load_esri_ascii, synth, write_esri_ascii

__version__ = "0.1.0"

__all__ = [
    "ArrivalField",
    "ControlDisc",
    "EnsembleResult",
    "LevelSetRun",
    "MobilityModel",
    "PathOptions",
    "PathTrace",
    "SolverOptions",
    "StartRegion",
    "TerrainGrid",
    "extract_path",
    "init_run",
    "load_esri_ascii",
    "path_length_time",
    "run_ensemble",
    "run_until_point",
    "run_until_region",
    "synth",
    "write_esri_ascii",
]
