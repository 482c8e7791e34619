"""Level-set front propagation for minimal walking times.

The field phi starts as the signed distance to a small circle around the
seed and evolves under phi_t + Hhat(x, grad phi) = 0 with the penalized
optimal-direction Hamiltonian, ENO2 one-sided derivatives, the Godunov
flux, and TVD-RK2 time stepping. First zero-crossing times are recorded
per node (the discrete minimal travel time), phi snapshots are stored for
later gradient queries by the path extractor, and the field is
periodically re-distanced to the signed distance of its current zero
contour.

Reverse mode evolves fronts outward from the destination over negated
elevation, so a single solve yields travel times for every candidate
start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    NoInterfaceError,
    NumericalBlowupError,
    ParameterError,
    UnreachableError,
)
from .hamiltonian import ControlDisc
from .mobility import MobilityModel
from .terrain import TerrainGrid

__all__ = [
    "SolverOptions",
    "ArrivalField",
    "LevelSetRun",
    "init_run",
    "eno2_onesided",
    "run_until_point",
    "run_until_region",
]

BOUNDARY_MARGIN_CELLS = 5  # seeds, targets and regions stay this far from the edge


@dataclass(frozen=True)
class SolverOptions:
    cfl: float = 0.5
    redistance_every: int = 20   # 0 disables re-distancing
    snapshot_every: int = 1
    max_steps: int = 20000

    def __post_init__(self):
        if not (0.0 < self.cfl <= 0.7):
            raise ParameterError(f"cfl must be in (0, 0.7], got {self.cfl}")
        if self.snapshot_every < 1:
            raise ParameterError("snapshot_every must be >= 1")
        if self.redistance_every < 0:
            raise ParameterError("redistance_every must be >= 0 (0 disables)")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be >= 1")


@dataclass(frozen=True)
class ArrivalField:
    """Per-node first-crossing times; NaN marks cells the front never reached."""

    grid: TerrainGrid
    times: np.ndarray

    def time_at(self, point) -> float:
        """Bilinear arrival time; NaN if any surrounding node is unset."""
        return self.grid.sample_field(self.times, point)

    def is_set(self, point) -> bool:
        return math.isfinite(self.time_at(point))


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # zero on sign disagreement, else the smaller magnitude
    return np.where(a * b <= 0.0, 0.0, np.where(np.abs(a) <= np.abs(b), a, b))


def eno2_onesided(values, spacing: float):
    """Second-order ENO minus/plus derivative estimates along a 1D profile.

    phi_x^- at i is D-phi_i + (h/2) * minmod of the two second differences
    biased left; phi_x^+ mirrors it. Nodes without two neighbors on the
    biased side fall back to first order.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    if n < 3:
        raise ParameterError("need at least 3 samples for one-sided estimates")
    h = float(spacing)
    d1 = np.diff(v) / h
    minus = np.empty(n)
    plus = np.empty(n)
    minus[1:] = d1
    minus[0] = d1[0]
    plus[:-1] = d1
    plus[-1] = d1[-1]
    if n >= 4:
        d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
        mm = _minmod(d2[:-1], d2[1:])
        minus[2:-1] += 0.5 * h * mm
        plus[1:-2] -= 0.5 * h * mm
    return minus, plus


def _eno2_field(phi: np.ndarray, h: float, axis: int):
    """Vectorized eno2_onesided along one axis of a 2D field."""
    v = phi if axis == 0 else phi.T
    n = v.shape[0]
    d1 = np.diff(v, axis=0) / h
    minus = np.empty_like(v)
    plus = np.empty_like(v)
    minus[1:] = d1
    minus[0] = d1[0]
    plus[:-1] = d1
    plus[-1] = d1[-1]
    if n >= 4:
        d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
        mm = _minmod(d2[:-1], d2[1:])
        minus[2:-1] += 0.5 * h * mm
        plus[1:-2] -= 0.5 * h * mm
    if axis == 0:
        return np.ascontiguousarray(minus), np.ascontiguousarray(plus)
    return np.ascontiguousarray(minus.T), np.ascontiguousarray(plus.T)


class LevelSetRun:
    """One evolving level-set computation (forward from a, or reverse from b).

    The run owns the current phi field, the arrival-time field, and the
    snapshot history. Reverse mode holds a negated-elevation view of the
    grid; everything downstream reads terrain through that view.
    """

    def __init__(self, grid: TerrainGrid, model: MobilityModel, disc: ControlDisc,
                 mode: str, seed, delta: float | None = None,
                 options: SolverOptions | None = None):
        if mode not in ("forward", "reverse"):
            raise ParameterError(f"mode must be 'forward' or 'reverse', got {mode!r}")
        self.grid = grid
        self.model = model
        self.disc = disc
        self.mode = mode
        self.options = options or SolverOptions()
        self.field_grid = grid.negated() if mode == "reverse" else grid

        seed = np.asarray(seed, dtype=float)
        hmax = max(grid.dx, grid.dy)
        if delta is None:
            delta = 3.0 * hmax
        if delta < 2.0 * hmax:
            raise ParameterError(
                f"delta={delta} under-resolves the seed circle; need >= {2.0 * hmax}"
            )
        _check_margin(grid, seed, "seed")
        self.seed = seed
        self.delta = float(delta)

        xs = grid.origin[0] + grid.dx * np.arange(grid.nx)
        ys = grid.origin[1] + grid.dy * np.arange(grid.ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        self._X, self._Y = X, Y
        self.phi = np.hypot(X - seed[0], Y - seed[1]) - self.delta
        self.time = 0.0
        self.steps_taken = 0
        self.arrival = np.full((grid.nx, grid.ny), np.nan)
        self.arrival[self.phi <= 0.0] = 0.0
        self.snapshots: list[tuple[float, np.ndarray]] = []
        self._record_snapshot()

        self._A, self._B = self._direction_tables()
        self.dt = self.options.cfl * min(grid.dx, grid.dy) / model.v_amp

    # -- setup ---------------------------------------------------------------

    def _direction_tables(self):
        """Penalized per-direction coefficients A, B with H(u,v) = max(Au + Bv)."""
        g = self.field_grid
        pen = self.model.penalization(np.hypot(g.grad_x, g.grad_y))
        cos_t = self.disc.cos_t
        sin_t = self.disc.sin_t
        slope = g.grad_x[:, :, None] * cos_t + g.grad_y[:, :, None] * sin_t
        speed = self.model.velocity(slope)
        A = np.ascontiguousarray(pen[:, :, None] * speed * cos_t)
        B = np.ascontiguousarray(pen[:, :, None] * speed * sin_t)
        return A, B

    def _record_snapshot(self):
        if self.snapshots and self.snapshots[-1][0] == self.time:
            self.snapshots[-1] = (self.time, self.phi.copy())
        else:
            self.snapshots.append((self.time, self.phi.copy()))

    # -- stepping ------------------------------------------------------------

    def _operator(self, phi: np.ndarray) -> np.ndarray:
        dmx, dpx = _eno2_field(phi, self.grid.dx, axis=0)
        dmy, dpy = _eno2_field(phi, self.grid.dy, axis=1)
        out = np.empty_like(phi)
        _kernels.godunov_flux_grid(self._A, self._B, dmx, dpx, dmy, dpy,
                                   self.disc.K, out)
        # one-cell inert margin: boundary estimates are first-order only and
        # not authoritative, so the outermost ring is never advanced
        out[0, :] = 0.0
        out[-1, :] = 0.0
        out[:, 0] = 0.0
        out[:, -1] = 0.0
        return out

    def step(self):
        """Advance one TVD-RK2 step and record new first-arrival crossings."""
        dt = self.dt
        phi0 = self.phi
        L0 = self._operator(phi0)
        phi1 = phi0 - dt * L0
        L1 = self._operator(phi1)
        phi_new = 0.5 * phi0 + 0.5 * (phi1 - dt * L1)
        if not np.all(np.isfinite(phi_new)):
            bad = int(np.count_nonzero(~np.isfinite(phi_new)))
            raise NumericalBlowupError(
                f"non-finite phi after step {self.steps_taken + 1} "
                f"(t={self.time + dt:.6g}): {bad} bad nodes, "
                f"max |phi| before step {np.max(np.abs(phi0)):.3g}"
            )
        crossed = np.isnan(self.arrival) & (phi0 > 0.0) & (phi_new <= 0.0)
        if crossed.any():
            frac = phi0[crossed] / (phi0[crossed] - phi_new[crossed])
            self.arrival[crossed] = self.time + dt * frac
        self.phi = phi_new
        self.time += dt
        self.steps_taken += 1

    def redistance(self):
        """Replace phi with the signed distance to its current zero contour.

        Interface-adjacent nodes get subcell distances from the linear zero
        crossings along grid edges (signs preserved, so the contour itself
        moves by well under a cell); the rest is filled by fast sweeping.
        """
        phi = self.phi
        if not (phi.min() < 0.0 < phi.max()):
            raise NoInterfaceError("phi is single-signed; no zero contour to distance to")
        nx, ny = phi.shape
        dx, dy = self.grid.dx, self.grid.dy
        d = np.full((nx, ny), 1.0e300)
        d[phi == 0.0] = 0.0

        cross_x = phi[:-1, :] * phi[1:, :] < 0.0
        if cross_x.any():
            f = phi[:-1, :][cross_x] / (phi[:-1, :][cross_x] - phi[1:, :][cross_x])
            idx = np.argwhere(cross_x)
            np.minimum.at(d, (idx[:, 0], idx[:, 1]), f * dx)
            np.minimum.at(d, (idx[:, 0] + 1, idx[:, 1]), (1.0 - f) * dx)
        cross_y = phi[:, :-1] * phi[:, 1:] < 0.0
        if cross_y.any():
            f = phi[:, :-1][cross_y] / (phi[:, :-1][cross_y] - phi[:, 1:][cross_y])
            idx = np.argwhere(cross_y)
            np.minimum.at(d, (idx[:, 0], idx[:, 1]), f * dy)
            np.minimum.at(d, (idx[:, 0], idx[:, 1] + 1), (1.0 - f) * dy)

        frozen = d < 1.0e300
        _kernels.fast_sweep(d, frozen, dx, dy)
        self.phi = np.where(phi >= 0.0, d, -d)

    def _advance(self):
        self.step()
        every = self.options.redistance_every
        if every and self.steps_taken % every == 0:
            self.redistance()
        if self.steps_taken % self.options.snapshot_every == 0:
            self._record_snapshot()

    def _coverage(self) -> float:
        interior = self.arrival[1:-1, 1:-1]
        return float(np.count_nonzero(np.isfinite(interior)) / interior.size)

    # -- queries ---------------------------------------------------------------

    def phi_at(self, point) -> float:
        return self.grid.sample_field(self.phi, point)

    def _bracket(self, t: float):
        times = [s[0] for s in self.snapshots]
        if t < -1e-12 or t > times[-1] + 1e-9 * max(1.0, times[-1]):
            raise ParameterError(
                f"time {t} outside snapshot range [0, {times[-1]}]"
            )
        t = min(max(t, 0.0), times[-1])
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), len(times) - 2) if len(times) > 1 else 0
        t0, f0 = self.snapshots[k]
        if len(times) == 1 or t == t0:
            return [(1.0, f0)]
        t1, f1 = self.snapshots[k + 1]
        if t == t1:
            return [(1.0, f1)]
        w = (t - t0) / (t1 - t0)
        return [(1.0 - w, f0), (w, f1)]

    def value_at(self, point, t: float) -> float:
        """phi at a world point and time, bilinear in space, linear in time."""
        return sum(w * self.grid.sample_field(f, point) for w, f in self._bracket(t))

    def gradient_at(self, point, t: float) -> np.ndarray:
        """Central-difference gradient of the snapshot fields at (point, t)."""
        pieces = self._bracket(t)
        i, j, tx, ty = self.grid._cell_frac(point)
        out = np.zeros(2)
        for w, fld in pieces:
            g = np.zeros((2, 2, 2))
            for di in (0, 1):
                for dj in (0, 1):
                    g[di, dj] = _node_gradient(fld, i + di, j + dj,
                                               self.grid.dx, self.grid.dy)
            gx = (g[0, 0, 0] * (1 - tx) * (1 - ty) + g[1, 0, 0] * tx * (1 - ty)
                  + g[0, 1, 0] * (1 - tx) * ty + g[1, 1, 0] * tx * ty)
            gy = (g[0, 0, 1] * (1 - tx) * (1 - ty) + g[1, 0, 1] * tx * (1 - ty)
                  + g[0, 1, 1] * (1 - tx) * ty + g[1, 1, 1] * tx * ty)
            out += w * np.array([gx, gy])
        return out

    @property
    def final_time(self) -> float:
        return self.snapshots[-1][0]

    def arrival_field(self) -> ArrivalField:
        return ArrivalField(grid=self.grid, times=self.arrival.copy())


def _node_gradient(fld: np.ndarray, i: int, j: int, dx: float, dy: float) -> np.ndarray:
    nx, ny = fld.shape
    if 0 < i < nx - 1:
        gx = (fld[i + 1, j] - fld[i - 1, j]) / (2.0 * dx)
    elif i == 0:
        gx = (fld[1, j] - fld[0, j]) / dx
    else:
        gx = (fld[nx - 1, j] - fld[nx - 2, j]) / dx
    if 0 < j < ny - 1:
        gy = (fld[i, j + 1] - fld[i, j - 1]) / (2.0 * dy)
    elif j == 0:
        gy = (fld[i, 1] - fld[i, 0]) / dy
    else:
        gy = (fld[i, ny - 1] - fld[i, ny - 2]) / dy
    return np.array([gx, gy])


def _check_margin(grid: TerrainGrid, point, what: str, extra: float = 0.0):
    mx = BOUNDARY_MARGIN_CELLS * grid.dx + extra
    my = BOUNDARY_MARGIN_CELLS * grid.dy + extra
    x0, y0, x1, y1 = grid.bounds
    if not (x0 + mx <= point[0] <= x1 - mx and y0 + my <= point[1] <= y1 - my):
        raise ParameterError(
            f"{what} ({point[0]}, {point[1]}) must keep a "
            f"{BOUNDARY_MARGIN_CELLS}-cell margin from the boundary"
        )


def init_run(grid: TerrainGrid, model: MobilityModel, disc: ControlDisc,
             mode: str, seed, delta: float | None = None,
             options: SolverOptions | None = None) -> LevelSetRun:
    """Start a run with phi(x, 0) = |x - seed| - delta."""
    return LevelSetRun(grid, model, disc, mode, seed, delta, options)


def run_until_point(run: LevelSetRun, target) -> float:
    """Step until the front covers the target point; return the crossing time.

    The crossing time is linearly interpolated between the last two bilinear
    phi values at the target. Raises UnreachableError (with the covered-node
    fraction) when the step budget runs out first.
    """
    target = np.asarray(target, dtype=float)
    _check_margin(run.grid, target, "target")
    prev = run.phi_at(target)
    if prev <= 0.0:
        raise ParameterError("target already inside the front at the current time")
    while run.steps_taken < run.options.max_steps:
        t_prev = run.time
        run._advance()
        cur = run.phi_at(target)
        if cur <= 0.0:
            t_star = t_prev + (run.time - t_prev) * prev / (prev - cur)
            run._record_snapshot()
            return float(t_star)
        prev = cur
    raise UnreachableError(
        f"target not reached within {run.options.max_steps} steps "
        f"(front covers {run._coverage():.1%} of the interior)",
        coverage=run._coverage(),
    )


def run_until_region(run: LevelSetRun, center, radius: float) -> ArrivalField:
    """Reverse-mode: step until every node of the disk has an arrival time.

    The disk is padded by one cell so bilinear arrival queries anywhere
    inside the region have all four surrounding nodes set.
    """
    if run.mode != "reverse":
        raise ParameterError("run_until_region requires a reverse-mode run")
    center = np.asarray(center, dtype=float)
    if radius <= 0:
        raise ParameterError("region radius must be positive")
    _check_margin(run.grid, center, "region center", extra=radius)
    if math.hypot(center[0] - run.seed[0], center[1] - run.seed[1]) <= radius + run.delta:
        raise ParameterError("region overlaps the seed disk around the destination")
    pad = max(run.grid.dx, run.grid.dy)
    mask = np.hypot(run._X - center[0], run._Y - center[1]) <= radius + pad
    while np.isnan(run.arrival[mask]).any():
        if run.steps_taken >= run.options.max_steps:
            raise UnreachableError(
                f"region not covered within {run.options.max_steps} steps "
                f"(front covers {run._coverage():.1%} of the interior)",
                coverage=run._coverage(),
            )
        run._advance()
    run._record_snapshot()
    return run.arrival_field()
