"""Shared fixtures: default models and the expensive session-scoped solves."""

import time

import pytest
from hypothesis import HealthCheck, settings

from walkfront.hamiltonian import ControlDisc
from walkfront.levelset import SolverOptions, init_run, run_until_point
from walkfront.mobility import MobilityModel
from walkfront.terrain import synth

settings.register_profile(
    "walkfront",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("walkfront")

# frozen closed-form constants (extended-precision evaluation)
V0 = 1.1081082237220438          # velocity(0)
P0 = 0.8807970779778824          # penalization(0)
SPEED0 = 0.9760184855376378      # P0 * V0, flat-ground front speed


@pytest.fixture(scope="session")
def model():
    return MobilityModel()


@pytest.fixture(scope="session")
def disc():
    return ControlDisc()


@pytest.fixture(scope="session")
def flat_grid_201():
    return synth("flat", nx=201, ny=201, dx=1.0, dy=1.0)


@pytest.fixture(scope="session")
def flat_solve_201(flat_grid_201, model, disc):
    """201x201 flat forward solve, |b - a| = 50, delta = 3; returns
    (run, t_star, wall_seconds)."""
    run = init_run(flat_grid_201, model, disc, "forward", (75.0, 100.0), delta=3.0)
    t0 = time.perf_counter()
    t_star = run_until_point(run, (125.0, 100.0))
    wall = time.perf_counter() - t0
    return run, t_star, wall


@pytest.fixture(scope="session")
def saddle_grid_101():
    """Two gaussian mountains on a vertical crest with the pass at (100, 100)."""
    return synth("saddle", nx=101, ny=101, dx=2.0, dy=2.0,
                 height=40.0, sigma=15.0, centers=((100.0, 70.0), (100.0, 130.0)))


@pytest.fixture(scope="session")
def saddle_solve_ew(saddle_grid_101, model, disc):
    """East-west solve through the pass: a = (30,100), b = (170,100), delta 4."""
    run = init_run(saddle_grid_101, model, disc, "forward", (30.0, 100.0), delta=4.0)
    t0 = time.perf_counter()
    t_star = run_until_point(run, (170.0, 100.0))
    wall = time.perf_counter() - t0
    return run, t_star, wall
