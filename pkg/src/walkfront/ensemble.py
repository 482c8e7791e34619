"""Uncertain-start workflow: one reverse solve, many paths, clustered routes.

A reverse-mode solve seeded at the destination (over negated elevation)
yields travel times for the whole start region at once. Starts are sampled
uniformly from the region disk, a path is extracted for each, the paths are
resampled to a common parameterization, and k-means on the resampled
coordinates groups them into representative routes with cluster fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans

from .errors import ParameterError, WalkfrontError
from .hamiltonian import ControlDisc
from .levelset import (
    BOUNDARY_MARGIN_CELLS,
    SolverOptions,
    init_run,
    run_until_region,
)
from .mobility import MobilityModel
from .path import REACHED, PathOptions, PathTrace, extract_path
from .terrain import TerrainGrid

__all__ = [
    "StartRegion",
    "EnsembleResult",
    "sample_region",
    "reparametrize",
    "path_distance",
    "cluster_paths",
    "run_ensemble",
]

CLUSTER_CUTOFF = 0.8  # clustering and the path metric ignore parameters past this


@dataclass(frozen=True)
class StartRegion:
    """Disk of possible start points with a sampling distribution."""

    center: tuple[float, float]
    radius: float
    distribution: str = "uniform_disk"

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("region radius must be positive")
        if self.distribution != "uniform_disk":
            raise ParameterError(f"unsupported distribution {self.distribution!r}")


@dataclass
class EnsembleResult:
    starts: np.ndarray                  # (n, 2)
    traces: list                        # PathTrace or None per start
    labels: np.ndarray                  # (n,) cluster index, -1 for failed
    representatives: np.ndarray         # (k, L, 2) per-cluster mean paths
    fractions: np.ndarray               # (k,) shares of successful traces
    seed: int
    failures: list = field(default_factory=list)   # (start index, reason)

    @property
    def n_failed(self) -> int:
        return int(np.count_nonzero(self.labels < 0))


def sample_region(region: StartRegion, n: int, seed: int) -> np.ndarray:
    """n points uniform over the disk, deterministic for a given seed."""
    if n < 1:
        raise ParameterError("need at least one sample")
    rng = np.random.default_rng(seed)
    r = region.radius * np.sqrt(rng.random(n))
    ang = 2.0 * np.pi * rng.random(n)
    return np.column_stack([
        region.center[0] + r * np.cos(ang),
        region.center[1] + r * np.sin(ang),
    ])


def reparametrize(trace: PathTrace, L: int) -> np.ndarray:
    """L samples of the path over [0, 1] with parameter 0 at the b-end.

    The parameter is elapsed travel time normalized by the trace's own total
    time; samples are linear interpolation along the time-stamped polyline.
    """
    if trace.terminus != REACHED:
        raise ParameterError(f"cannot reparametrize a trace with terminus {trace.terminus!r}")
    if L < 2:
        raise ParameterError("need at least two samples")
    total = float(trace.taus[-1])
    if total <= 0.0:
        raise ParameterError("zero-duration trace")
    if trace.destination_at_start:
        par = trace.taus / total
        pts = trace.points
    else:
        par = (1.0 - trace.taus / total)[::-1]
        pts = trace.points[::-1]
    t = np.linspace(0.0, 1.0, L)
    return np.column_stack([
        np.interp(t, par, pts[:, 0]),
        np.interp(t, par, pts[:, 1]),
    ])


def path_distance(P: np.ndarray, Q: np.ndarray) -> float:
    """Trapezoid integral of |P(t) - Q(t)| over the samples with t <= 0.8."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ParameterError(f"sample counts differ: {P.shape} vs {Q.shape}")
    L = P.shape[0]
    t = np.linspace(0.0, 1.0, L)
    m = t <= CLUSTER_CUTOFF + 1e-12
    gaps = np.hypot(*(P[m] - Q[m]).T)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return float(trapezoid(gaps, t[m]))


def cluster_paths(traces, k: int, L: int, seed: int):
    """k-means over resampled path coordinates restricted to t <= 0.8.

    Returns (labels, representatives, fractions) for the successful traces,
    in their input order. Representatives are per-cluster means of the full
    L-point resampled paths; fractions are cluster sizes over the successful
    count.
    """
    ok = [tr for tr in traces if tr is not None and tr.terminus == REACHED]
    if len(ok) < k:
        raise ParameterError(f"only {len(ok)} successful traces for k={k} clusters")
    resampled = np.stack([reparametrize(tr, L) for tr in ok])
    t = np.linspace(0.0, 1.0, L)
    m = t <= CLUSTER_CUTOFF + 1e-12
    feats = resampled[:, m, :].reshape(len(ok), -1)
    km = KMeans(n_clusters=k, init="k-means++", n_init=20,
                random_state=int(seed) % (2 ** 31), algorithm="lloyd")
    labels = km.fit_predict(feats)
    representatives = np.stack([resampled[labels == c].mean(axis=0) for c in range(k)])
    counts = np.bincount(labels, minlength=k)
    fractions = counts / counts.sum()
    return labels, representatives, fractions


def run_ensemble(grid: TerrainGrid, model: MobilityModel, disc: ControlDisc,
                 b, region: StartRegion, n: int, k: int, *,
                 L: int = 51, seed: int = 0, delta: float | None = None,
                 solver_options: SolverOptions | None = None,
                 path_options: PathOptions | None = None) -> EnsembleResult:
    """One reverse solve from b, n extracted paths from the region, clustered.

    Failed extractions are recorded per start and excluded from clustering;
    they never abort the run.
    """
    b = np.asarray(b, dtype=float)
    _check_region(grid, region)
    run = init_run(grid, model, disc, "reverse", b, delta=delta, options=solver_options)
    if math.hypot(region.center[0] - b[0], region.center[1] - b[1]) <= region.radius + run.delta:
        raise ParameterError("start region overlaps the destination's seed disk")
    arrival = run_until_region(run, region.center, region.radius)
    starts = sample_region(region, n, seed)

    traces: list = []
    failures: list = []
    for idx in range(n):
        a_i = starts[idx]
        try:
            t_i = arrival.time_at(a_i)
            tr = extract_path(run, a_i, t_i, path_options)
        except WalkfrontError as exc:
            failures.append((idx, str(exc)))
            traces.append(None)
            continue
        traces.append(tr)
        if tr.terminus != REACHED:
            failures.append((idx, f"terminus {tr.terminus}"))

    ok_idx = [i for i, tr in enumerate(traces)
              if tr is not None and tr.terminus == REACHED]
    labels_ok, representatives, fractions = cluster_paths(
        [traces[i] for i in ok_idx], k, L, seed)
    labels = np.full(n, -1, dtype=int)
    labels[ok_idx] = labels_ok
    return EnsembleResult(
        starts=starts, traces=traces, labels=labels,
        representatives=representatives, fractions=fractions,
        seed=int(seed), failures=failures,
    )


def _check_region(grid: TerrainGrid, region: StartRegion):
    mx = BOUNDARY_MARGIN_CELLS * grid.dx + region.radius
    my = BOUNDARY_MARGIN_CELLS * grid.dy + region.radius
    x0, y0, x1, y1 = grid.bounds
    cx, cy = region.center
    if not (x0 + mx <= cx <= x1 - mx and y0 + my <= cy <= y1 - my):
        raise ParameterError(
            "start region must lie inside the domain with a "
            f"{BOUNDARY_MARGIN_CELLS}-cell margin"
        )
