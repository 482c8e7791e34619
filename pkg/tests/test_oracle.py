import numpy as np
import pytest

from conftest import SPEED0
from walkfront.errors import ParameterError
from walkfront.mobility import MobilityModel
from walkfront.oracle import dijkstra_path, dijkstra_times
from walkfront.terrain import TerrainGrid, synth

MODEL = MobilityModel()


def test_flat_axis_aligned_time_is_exact():
    g = synth("flat", nx=101, ny=101)
    times = dijkstra_times(g, MODEL, (30, 50), "n8")
    assert times[30, 50] == 0.0
    assert times[80, 50] == pytest.approx(50.0 / SPEED0, rel=1e-12)
    assert times[30, 90] == pytest.approx(40.0 / SPEED0, rel=1e-12)


def test_flat_metrication_bounds_at_knight_angle():
    # target along (2, 1): atan(1/2) = 26.57 deg, the worst-ish N8 angle
    g = synth("flat", nx=101, ny=101)
    src = (20, 40)
    tgt = (80, 70)     # offset (60, 30) = 30 * (2, 1)
    continuum = np.hypot(60.0, 30.0) / SPEED0
    t8 = dijkstra_times(g, MODEL, src, "n8")[tgt]
    t16 = dijkstra_times(g, MODEL, src, "n16")[tgt]
    over8 = t8 / continuum - 1.0
    over16 = t16 / continuum - 1.0
    assert 0.0 <= over8 <= 0.082
    assert over8 == pytest.approx((1.0 + np.sqrt(2.0)) / np.sqrt(5.0) - 1.0, abs=1e-9)
    assert 0.0 <= over16 <= 0.028
    assert over16 == pytest.approx(0.0, abs=1e-9)   # (2,1) is an n16 edge


def test_n16_never_slower_than_n8():
    g = synth("saddle", nx=41, ny=41, dx=5.0, dy=5.0)
    t8 = dijkstra_times(g, MODEL, (5, 5), "n8")
    t16 = dijkstra_times(g, MODEL, (5, 5), "n16")
    assert np.all(t16 <= t8 + 1e-9)


def test_directed_asymmetry_uphill_slower():
    # plane E = 0.3 x: walking +x climbs, -x descends
    xs = 0.3 * np.arange(41)[:, None] * np.ones((1, 41))
    g = TerrainGrid(41, 41, 1.0, 1.0, (0.0, 0.0), xs)
    up = dijkstra_times(g, MODEL, (5, 20), "n8")[35, 20]
    down = dijkstra_times(g, MODEL, (35, 20), "n8")[5, 20]
    assert up > down


def test_path_flat_is_a_monotone_staircase_at_optimal_cost():
    # flat ground makes every monotone staircase a cost tie, so the
    # predecessor chain is one of many optima; assert monotonicity and the
    # exact best n16 edge mix: 25 knight moves (2,1) plus 20 straight
    g = synth("flat", nx=101, ny=101)
    pts, t = dijkstra_path(g, MODEL, (20, 30), (90, 55), "n16")
    assert tuple(pts[0]) == (20.0, 30.0)
    assert tuple(pts[-1]) == (90.0, 55.0)
    steps = np.diff(pts, axis=0)
    assert np.all(steps[:, 0] >= 0) and np.all(steps[:, 1] >= 0)
    assert t == pytest.approx((25.0 * np.sqrt(5.0) + 20.0) / SPEED0, rel=1e-12)


def test_path_source_equals_target():
    g = synth("flat", nx=21, ny=21)
    pts, t = dijkstra_path(g, MODEL, (10, 10), (10, 10))
    assert len(pts) == 1 and t == 0.0


def test_path_routes_through_the_pass(saddle_grid_101):
    pts, t = dijkstra_path(saddle_grid_101, MODEL, (15, 50), (85, 50), "n16")
    elevs = [saddle_grid_101.sample_elevation(p) for p in pts]
    assert max(elevs) < 0.5 * saddle_grid_101.elevation.max()


def test_bad_stencil_and_node():
    g = synth("flat", nx=21, ny=21)
    with pytest.raises(ParameterError):
        dijkstra_times(g, MODEL, (5, 5), "n32")
    with pytest.raises(ParameterError):
        dijkstra_times(g, MODEL, (50, 5), "n8")
