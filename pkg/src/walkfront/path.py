"""Optimal-path extraction by backward characteristic integration.

Starting from the query point with momentum p = grad phi there, the system
xdot = -grad_p H, pdot = grad_x H is integrated with fixed-step RK4 while
the backtracked time runs from t* down to 0. The momentum is periodically
re-initialized to grad phi(x, t) from the stored snapshots, which bounds
the drift that otherwise sends the trace wandering off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMomentumError, ParameterError
from .hamiltonian import grad_p_h, grad_x_h
from .levelset import LevelSetRun

__all__ = ["PathOptions", "PathTrace", "extract_path", "path_length_time"]

REACHED = "reached_seed_disk"
EXHAUSTED = "time_exhausted"
LEFT_DOMAIN = "left_domain"

_P_TINY = 1e-12


@dataclass(frozen=True)
class PathOptions:
    h_step: float | None = None     # default min(dx,dy) / (4 v_amp)
    reinit_every: int | None = 5    # steps between p resets; None/0 disables


@dataclass
class PathTrace:
    """Time-stamped polyline from one backward integration.

    tau is elapsed backtrack time from the origin; the x and p histories are
    stored per vertex. In forward mode the origin is the destination b; in
    reverse mode the trace runs from a candidate start toward b's seed disk.
    """

    taus: np.ndarray        # (n,)
    points: np.ndarray      # (n, 2)
    momenta: np.ndarray     # (n, 2)
    t_star: float
    terminus: str
    origin: np.ndarray
    mode: str
    seed: np.ndarray
    delta: float

    @property
    def destination_at_start(self) -> bool:
        """True when vertices[0] is the b-end (forward-mode extraction)."""
        return self.mode == "forward"

    def __len__(self) -> int:
        return len(self.taus)


def _clamped(grid, x, margin):
    cx = min(max(x[0], grid.bounds[0] + margin), grid.bounds[2] - margin)
    cy = min(max(x[1], grid.bounds[1] + margin), grid.bounds[3] - margin)
    return np.array([cx, cy]), math.hypot(cx - x[0], cy - x[1])


def extract_path(run: LevelSetRun, origin, t_star: float,
                 options: PathOptions | None = None) -> PathTrace:
    """Integrate the characteristic system backward from `origin` for t*.

    Stops on reaching the seed disk (success), on exhausting the backtrack
    time, or with a flagged failure when the trace has to be projected back
    into the domain by more than one cell. Field evaluations read terrain
    through the run's (possibly negated) elevation view.
    """
    options = options or PathOptions()
    grid = run.grid
    fgrid = run.field_grid
    model, disc = run.model, run.disc
    origin = np.asarray(origin, dtype=float)
    if not grid.contains(origin):
        raise ParameterError(f"origin ({origin[0]}, {origin[1]}) outside the domain")
    if not np.isfinite(t_star) or t_star <= 0.0:
        raise ParameterError(f"origin has no usable arrival time (t*={t_star})")
    if run.final_time + run.dt < t_star:
        raise ParameterError(
            f"snapshots end at t={run.final_time:.6g}, cannot backtrack from t*={t_star:.6g}"
        )

    h_default = min(grid.dx, grid.dy) / (4.0 * model.v_amp)
    h = options.h_step if options.h_step else h_default
    reinit_every = options.reinit_every or 0
    margin = max(grid.dx, grid.dy) * 0.5 + 0.5 * min(grid.dx, grid.dy)
    max_clamp = max(grid.dx, grid.dy)
    success_radius = run.delta + max(grid.dx, grid.dy)

    x = origin.copy()
    p = run.gradient_at(x, min(t_star, run.final_time))
    if np.hypot(p[0], p[1]) < _P_TINY:
        raise DegenerateMomentumError(
            "initial momentum grad phi vanished at the origin (stagnant region)"
        )

    def rhs(xv, pv):
        xc, excess = _clamped(grid, xv, margin)
        ge = fgrid.sample_gradient(xc)
        xdot = -grad_p_h(model, disc, ge, pv)
        pdot = grad_x_h(fgrid, model, disc, xc, pv)
        return xdot, pdot, excess

    taus = [0.0]
    points = [x.copy()]
    momenta = [p.copy()]
    terminus = EXHAUSTED
    tau = 0.0
    step_idx = 0
    worst_clamp = 0.0

    while tau < t_star - 1e-12:
        h_cur = min(h, t_star - tau)
        k1x, k1p, e1 = rhs(x, p)
        k2x, k2p, e2 = rhs(x + 0.5 * h_cur * k1x, p + 0.5 * h_cur * k1p)
        k3x, k3p, e3 = rhs(x + 0.5 * h_cur * k2x, p + 0.5 * h_cur * k2p)
        k4x, k4p, e4 = rhs(x + h_cur * k3x, p + h_cur * k3p)
        x = x + (h_cur / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + (h_cur / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        tau += h_cur
        step_idx += 1

        xc, excess = _clamped(grid, x, margin)
        worst_clamp = max(worst_clamp, excess, e1, e2, e3, e4)
        x = xc
        taus.append(tau)
        points.append(x.copy())
        momenta.append(p.copy())

        if worst_clamp > max_clamp:
            terminus = LEFT_DOMAIN
            break
        if math.hypot(x[0] - run.seed[0], x[1] - run.seed[1]) <= success_radius:
            terminus = REACHED
            break
        if reinit_every and step_idx % reinit_every == 0:
            t_back = min(max(t_star - tau, 0.0), run.final_time)
            p = run.gradient_at(x, t_back)
            if np.hypot(p[0], p[1]) < _P_TINY:
                raise DegenerateMomentumError(
                    f"momentum re-initialization vanished at ({x[0]:.3g}, {x[1]:.3g}), "
                    f"tau={tau:.6g}"
                )
            momenta[-1] = p.copy()

    if terminus == EXHAUSTED and math.hypot(
            x[0] - run.seed[0], x[1] - run.seed[1]) <= success_radius:
        terminus = REACHED

    return PathTrace(
        taus=np.asarray(taus),
        points=np.asarray(points),
        momenta=np.asarray(momenta),
        t_star=float(t_star),
        terminus=terminus,
        origin=origin,
        mode=run.mode,
        seed=run.seed.copy(),
        delta=run.delta,
    )


def path_length_time(trace: PathTrace) -> tuple[float, float]:
    """Polyline arc length and the stored optimal travel time."""
    if len(trace) == 0:
        raise ParameterError("empty trace")
    seg = np.diff(trace.points, axis=0)
    return float(np.hypot(seg[:, 0], seg[:, 1]).sum()), trace.t_star
