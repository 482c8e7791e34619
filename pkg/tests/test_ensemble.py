import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkfront.ensemble import (
    StartRegion,
    cluster_paths,
    path_distance,
    reparametrize,
    run_ensemble,
    sample_region,
)
from walkfront.errors import ParameterError
from walkfront.hamiltonian import ControlDisc
from walkfront.levelset import init_run, run_until_point
from walkfront.mobility import MobilityModel
from walkfront.path import EXHAUSTED, REACHED, PathTrace

MODEL = MobilityModel()
DISC = ControlDisc()


def _straight_trace(start, end, duration, n=40, mode="forward", terminus=REACHED):
    """Synthetic constant-speed trace from start to end."""
    taus = np.linspace(0.0, duration, n)
    f = (taus / duration)[:, None]
    pts = np.asarray(start) * (1 - f) + np.asarray(end) * f
    return PathTrace(
        taus=taus, points=pts, momenta=np.zeros((n, 2)), t_star=duration,
        terminus=terminus, origin=np.asarray(start, dtype=float), mode=mode,
        seed=np.asarray(end if mode == "reverse" else start, dtype=float),
        delta=1.0,
    )


# -- sampling -------------------------------------------------------------------

def test_sample_region_uniform_disk_stats():
    region = StartRegion(center=(10.0, -4.0), radius=6.0)
    pts = sample_region(region, 4000, seed=42)
    d = np.hypot(pts[:, 0] - 10.0, pts[:, 1] + 4.0)
    assert np.all(d <= 6.0 + 1e-12)
    assert d.mean() == pytest.approx(2.0 * 6.0 / 3.0, rel=0.05)


def test_sample_region_deterministic_and_single():
    region = StartRegion(center=(0.0, 0.0), radius=2.0)
    assert np.array_equal(sample_region(region, 17, 7), sample_region(region, 17, 7))
    one = sample_region(region, 1, 3)
    assert one.shape == (1, 2) and np.hypot(*one[0]) <= 2.0
    with pytest.raises(ParameterError):
        sample_region(region, 0, 1)
    with pytest.raises(ParameterError):
        StartRegion(center=(0.0, 0.0), radius=-1.0)
    with pytest.raises(ParameterError):
        StartRegion(center=(0.0, 0.0), radius=1.0, distribution="grid")


# -- reparametrization ------------------------------------------------------------

def test_reparametrize_forward_trace():
    # forward mode: the origin is the destination b
    tr = _straight_trace((50.0, 10.0), (10.0, 10.0), duration=40.0)
    P = reparametrize(tr, 21)
    assert np.array_equal(P[0], [50.0, 10.0])     # parameter 0 -> b end
    assert np.array_equal(P[-1], [10.0, 10.0])    # parameter 1 -> a end
    gaps = np.hypot(*np.diff(P, axis=0).T)
    assert np.allclose(gaps, gaps[0], atol=1e-9)  # constant speed -> equal spacing


def test_reparametrize_reverse_trace_flips():
    # reverse mode: the trace runs start -> b, parameter 0 must be the b end
    tr = _straight_trace((10.0, 10.0), (50.0, 10.0), duration=40.0, mode="reverse")
    P = reparametrize(tr, 21)
    assert np.array_equal(P[0], [50.0, 10.0])
    assert np.array_equal(P[-1], [10.0, 10.0])


def test_reparametrize_rejects_bad_traces():
    bad = _straight_trace((0.0, 0.0), (1.0, 0.0), 1.0, terminus=EXHAUSTED)
    with pytest.raises(ParameterError):
        reparametrize(bad, 10)
    with pytest.raises(ParameterError):
        reparametrize(_straight_trace((0.0, 0.0), (1.0, 0.0), 1.0), 1)


# -- the path metric ---------------------------------------------------------------

def test_path_distance_constant_offset():
    tr1 = _straight_trace((0.0, 0.0), (10.0, 0.0), 10.0)
    tr2 = _straight_trace((0.0, 1.0), (10.0, 1.0), 10.0)
    # 41 samples put a node exactly at parameter 0.8
    P, Q = reparametrize(tr1, 41), reparametrize(tr2, 41)
    assert path_distance(P, Q) == pytest.approx(0.8, abs=1e-12)
    assert path_distance(P, P) == 0.0


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=20)
def test_path_distance_symmetric(seed):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(31, 2))
    Q = rng.normal(size=(31, 2))
    assert path_distance(P, Q) == path_distance(Q, P)
    assert path_distance(P, Q) >= 0.0


def test_path_distance_shape_mismatch():
    with pytest.raises(ParameterError):
        path_distance(np.zeros((10, 2)), np.zeros((11, 2)))


def test_path_distance_converges_when_doubling_samples():
    rng = np.random.default_rng(5)
    # smooth random polylines via cumulative sums of small increments
    def smooth_trace(seed):
        r = np.random.default_rng(seed)
        steps = 0.5 + 0.1 * np.sin(np.linspace(0, 3, 60) + r.uniform(0, 6))
        pts = np.column_stack([np.cumsum(steps), np.cumsum(0.3 * np.cos(
            np.linspace(0, 2, 60) + r.uniform(0, 6)))])
        taus = np.linspace(0.0, 30.0, 60)
        return PathTrace(taus=taus, points=pts, momenta=np.zeros((60, 2)),
                         t_star=30.0, terminus=REACHED, origin=pts[0],
                         mode="forward", seed=pts[-1], delta=1.0)
    t1, t2 = smooth_trace(1), smooth_trace(2)
    d_l = path_distance(reparametrize(t1, 41), reparametrize(t2, 41))
    d_2l = path_distance(reparametrize(t1, 81), reparametrize(t2, 81))
    assert abs(d_2l - d_l) / d_l < 0.01


# -- clustering ---------------------------------------------------------------------

def test_cluster_two_separated_bundles():
    rng = np.random.default_rng(9)
    traces = []
    for k in range(50):
        dy = rng.normal(0, 0.3)
        traces.append(_straight_trace((0.0, 20.0 + dy), (30.0, 20.0 + dy), 25.0))
    for k in range(50):
        dy = rng.normal(0, 0.3)
        traces.append(_straight_trace((0.0, -20.0 + dy), (30.0, -20.0 + dy), 25.0))
    labels, reps, fractions = cluster_paths(traces, k=2, L=31, seed=0)
    assert len(set(labels[:50])) == 1
    assert len(set(labels[50:])) == 1
    assert labels[0] != labels[50]
    assert np.allclose(sorted(fractions), [0.5, 0.5])
    assert reps.shape == (2, 31, 2)
    # representatives sit near the bundle centerlines
    ys = sorted(reps[:, :, 1].mean(axis=1))
    assert ys[0] == pytest.approx(-20.0, abs=0.5)
    assert ys[1] == pytest.approx(20.0, abs=0.5)


def test_cluster_k1_representative_is_pointwise_mean():
    traces = [_straight_trace((0.0, float(y)), (30.0, float(y)), 25.0)
              for y in (0.0, 2.0, 4.0)]
    labels, reps, fractions = cluster_paths(traces, k=1, L=11, seed=0)
    assert np.all(labels == 0)
    assert fractions.tolist() == [1.0]
    stacked = np.stack([reparametrize(t, 11) for t in traces])
    assert np.allclose(reps[0], stacked.mean(axis=0))


def test_cluster_requires_enough_successes():
    traces = [_straight_trace((0.0, 0.0), (1.0, 0.0), 1.0),
              _straight_trace((0.0, 1.0), (1.0, 1.0), 1.0, terminus=EXHAUSTED)]
    with pytest.raises(ParameterError):
        cluster_paths(traces, k=2, L=11, seed=0)


# -- the full ensemble ---------------------------------------------------------------

@pytest.fixture(scope="module")
def ns_saddle_ensemble(saddle_grid_101):
    region = StartRegion(center=(100.0, 30.0), radius=15.0)
    result = run_ensemble(saddle_grid_101, MODEL, DISC, (100.0, 170.0), region,
                          n=24, k=2, L=41, seed=11, delta=4.0)
    return result


def test_ensemble_partitions_and_reaches(ns_saddle_ensemble, saddle_grid_101):
    res = ns_saddle_ensemble
    ok = res.labels >= 0
    assert ok.sum() + res.n_failed == 24
    assert np.isclose(res.fractions.sum(), 1.0)
    assert res.representatives.shape == (2, 41, 2)
    for i in np.where(ok)[0]:
        tr = res.traces[i]
        assert tr.terminus == REACHED
        # reverse-mode success: the trace ends on b's seed disk
        assert np.hypot(*(tr.points[-1] - np.array([100.0, 170.0]))) <= 4.0 + 2.0
        assert np.allclose(tr.points[0], res.starts[i])


def test_ensemble_clusters_split_by_crest_side(ns_saddle_ensemble):
    res = ns_saddle_ensemble
    ok = np.where(res.labels >= 0)[0]
    sides = []
    for i in ok:
        P = reparametrize(res.traces[i], 41)
        t = np.linspace(0, 1, 41)
        sides.append(np.sign(P[t <= 0.8, 0].mean() - 100.0))
    sides = np.array(sides)
    labels = res.labels[ok]
    agree = max(np.mean(labels == (sides > 0)), np.mean(labels == (sides < 0)))
    assert agree >= 0.95


def test_ensemble_arrival_audit_against_forward_solves(saddle_grid_101):
    # reverse-mode field times vs independent forward solves at 5 starts
    region = StartRegion(center=(100.0, 30.0), radius=15.0)
    b = (100.0, 170.0)
    run = init_run(saddle_grid_101, MODEL, DISC, "reverse", b, delta=4.0)
    from walkfront.levelset import run_until_region
    arrival = run_until_region(run, region.center, region.radius)
    starts = sample_region(region, 5, seed=99)
    for a_i in starts:
        fwd = init_run(saddle_grid_101, MODEL, DISC, "forward", a_i, delta=4.0)
        t_fwd = run_until_point(fwd, b)
        t_rev = arrival.time_at(a_i)
        assert t_rev == pytest.approx(t_fwd, rel=0.03)


def test_ensemble_region_validation(saddle_grid_101):
    with pytest.raises(ParameterError):
        run_ensemble(saddle_grid_101, MODEL, DISC, (100.0, 170.0),
                     StartRegion(center=(100.0, 8.0), radius=15.0), n=4, k=2)
    with pytest.raises(ParameterError):
        run_ensemble(saddle_grid_101, MODEL, DISC, (100.0, 40.0),
                     StartRegion(center=(100.0, 30.0), radius=15.0), n=4, k=2)
