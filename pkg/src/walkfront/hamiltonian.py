"""The penalized optimal-direction Hamiltonian and its numerical machinery.

``H(x, p) = P(|gradE|) * max_theta V(s(theta).gradE) * (s(theta).p)`` with the
maximum taken over a finite direction set. The Godunov flux extremizes H over
intervals spanned by one-sided derivative estimates; the momentum and spatial
gradients of H feed the backward characteristic ODEs.

These are the scalar per-point reference implementations. The level-set
solver uses the batch kernel in :mod:`walkfront._kernels`, which is tested
against :func:`godunov_flux` on random inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMomentumError, OutOfDomainError, ParameterError
from .mobility import MobilityModel
from .terrain import TerrainGrid

__all__ = [
    "ControlDisc",
    "HamiltonianEval",
    "directional_h",
    "optimal_h",
    "penalized_h",
    "godunov_flux",
    "grad_p_h",
    "grad_x_h",
]


@dataclass(frozen=True)
class ControlDisc:
    """Discretization of the walking-direction control.

    Directions are theta_m = 2*pi*m/M for m = 1..M; ties in the discrete
    argmax are broken toward the smallest theta for reproducible paths.
    K is the number of interior samples used to resolve each Godunov
    interval extremum.
    """

    M: int = 64
    K: int = 5
    thetas: np.ndarray = field(default=None, repr=False)
    cos_t: np.ndarray = field(default=None, repr=False)
    sin_t: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.M < 8:
            raise ParameterError(f"need at least 8 directions, got M={self.M}")
        if self.K < 3:
            raise ParameterError(f"need at least 3 interval samples, got K={self.K}")
        thetas = 2.0 * np.pi * np.arange(1, self.M + 1) / self.M
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "cos_t", np.cos(thetas))
        object.__setattr__(self, "sin_t", np.sin(thetas))
        for arr in (self.thetas, self.cos_t, self.sin_t):
            arr.setflags(write=False)


@dataclass(frozen=True)
class HamiltonianEval:
    value: float
    argmax_theta: float


def directional_h(model: MobilityModel, gradE, theta: float, p) -> float:
    """V(s.gradE) * (s.p) for a single direction; may be negative."""
    c, s = math.cos(theta), math.sin(theta)
    speed = model.velocity(c * float(gradE[0]) + s * float(gradE[1]))
    return speed * (c * float(p[0]) + s * float(p[1]))


def _direction_values(model: MobilityModel, disc: ControlDisc, gradE, p) -> np.ndarray:
    slope = disc.cos_t * float(gradE[0]) + disc.sin_t * float(gradE[1])
    speed = model.velocity(slope)
    return speed * (disc.cos_t * float(p[0]) + disc.sin_t * float(p[1]))


def optimal_h(model: MobilityModel, disc: ControlDisc, gradE, p) -> HamiltonianEval:
    """Discrete maximum of the directional Hamiltonian, argmax recorded.

    Nonnegative for every p: some direction has s.p >= 0. Positively
    homogeneous of degree one in p, including the argmax.
    """
    vals = _direction_values(model, disc, gradE, p)
    m = int(np.argmax(vals))  # argmax returns the first (smallest-theta) max
    return HamiltonianEval(value=float(vals[m]), argmax_theta=float(disc.thetas[m]))


def penalized_h(model: MobilityModel, disc: ControlDisc, gradE, p) -> HamiltonianEval:
    """optimal_h scaled by the high-slope penalization at |gradE|."""
    pen = model.penalization(math.hypot(float(gradE[0]), float(gradE[1])))
    base = optimal_h(model, disc, gradE, p)
    return HamiltonianEval(value=pen * base.value, argmax_theta=base.argmax_theta)


def _interval_candidates(a: float, b: float, K: int) -> np.ndarray:
    """Candidate set for one Godunov extremum: both endpoints, 0 if interior,
    and K equispaced interior samples."""
    if a == b:
        return np.array([a])
    lo, hi = (a, b) if a <= b else (b, a)
    cands = [a, b]
    if lo < 0.0 < hi:
        cands.append(0.0)
    step = (hi - lo) / (K + 1)
    cands.extend(lo + step * k for k in range(1, K + 1))
    return np.array(cands)


def godunov_flux(model: MobilityModel, disc: ControlDisc, gradE,
                 dmx: float, dpx: float, dmy: float, dpy: float) -> float:
    """Upwind numerical Hamiltonian from one-sided derivative estimates.

    ext over u in I(dmx, dpx) of ext over v in I(dmy, dpy) of the penalized
    H at p = (u, v), where ext is min when the minus estimate <= plus
    estimate and max otherwise. Singleton intervals reproduce penalized_h
    exactly.
    """
    u_cands = _interval_candidates(dmx, dpx, disc.K)
    v_cands = _interval_candidates(dmy, dpy, disc.K)
    u_min = dmx <= dpx
    v_min = dmy <= dpy
    inner = min if v_min else max
    outer = min if u_min else max
    g_vals = []
    for u in u_cands:
        g_vals.append(inner(
            penalized_h(model, disc, gradE, (u, v)).value for v in v_cands
        ))
    return outer(g_vals)


def grad_p_h(model: MobilityModel, disc: ControlDisc, gradE, p) -> np.ndarray:
    """Momentum gradient of the penalized H by the envelope theorem.

    Exact for the discrete Hamiltonian wherever the argmax is unique:
    the gradient is P * V(s(theta*).gradE) * s(theta*).
    """
    if float(p[0]) == 0.0 and float(p[1]) == 0.0:
        raise DegenerateMomentumError("grad_p_h undefined at p = 0; re-initialize p")
    ev = penalized_h(model, disc, gradE, p)
    c, s = math.cos(ev.argmax_theta), math.sin(ev.argmax_theta)
    pen = model.penalization(math.hypot(float(gradE[0]), float(gradE[1])))
    speed = model.velocity(c * float(gradE[0]) + s * float(gradE[1]))
    return pen * speed * np.array([c, s])


def grad_x_h(grid: TerrainGrid, model: MobilityModel, disc: ControlDisc, x, p) -> np.ndarray:
    """Spatial gradient of the penalized H by central differences.

    Step is min(dx, dy)/2; the terrain gradient is re-sampled at the shifted
    points while p is held fixed. The whole stencil must stay inside the
    domain.
    """
    h_fd = 0.5 * min(grid.dx, grid.dy)
    x = np.asarray(x, dtype=float)
    out = np.empty(2)
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = h_fd
        try:
            hp = penalized_h(model, disc, grid.sample_gradient(x + shift), p).value
            hm = penalized_h(model, disc, grid.sample_gradient(x - shift), p).value
        except OutOfDomainError as exc:
            raise OutOfDomainError(
                f"finite-difference stencil around ({x[0]}, {x[1]}) leaves the domain"
            ) from exc
        out[axis] = (hp - hm) / (2.0 * h_fd)
    return out
