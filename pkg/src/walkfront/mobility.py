"""Slope-dependent walking speed and the high-slope penalization factor.

The speed law peaks on a slight downhill (grade -2%) and decays to zero for
extreme grades; the legacy bounded-below law is kept only for comparison
plots. The penalization factor throttles travel in any direction where the
maximal local slope is severe, since the directional speed alone cannot see
the cross-slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = ["MobilityModel"]


@dataclass(frozen=True)
class MobilityModel:
    """Walking-speed model constants. Defaults reproduce the standard law.

    With dx in meters the speeds are m/s and all travel times are seconds;
    nothing in the package ever converts units.
    """

    v_amp: float = 1.11      # peak speed
    v_shift: float = 2.0     # percent-grade offset of the peak
    v_denom: float = 2345.0  # exponential denominator
    pen_center: float = 1.0  # slope at which penalization reaches 1/2
    pen_scale: float = 1.0   # tanh width of the penalization roll-off

    def __post_init__(self):
        if self.v_amp <= 0 or self.v_denom <= 0:
            raise ParameterError("v_amp and v_denom must be positive")
        if self.pen_scale <= 0:
            raise ParameterError("pen_scale must be positive")

    def velocity(self, S):
        """Walking speed at slope S (rise/run). Strictly positive, maximal
        at S = -v_shift/100."""
        S = np.asarray(S, dtype=float)
        out = self.v_amp * np.exp(-((100.0 * S + self.v_shift) ** 2) / self.v_denom)
        return out if out.ndim else float(out)

    def velocity_ic(self, S):
        """Legacy comparison law, bounded below by 0.11."""
        S = np.asarray(S, dtype=float)
        out = 0.11 + np.exp(-((100.0 * S + self.v_shift) ** 2) / 1800.0)
        return out if out.ndim else float(out)

    def penalization(self, S):
        """High-slope penalization in (0, 1) for slope magnitude S >= 0."""
        S = np.asarray(S, dtype=float)
        if np.any(S < 0):
            raise ParameterError("penalization takes a nonnegative slope magnitude")
        out = 0.5 - 0.5 * np.tanh((S - self.pen_center) / self.pen_scale)
        return out if out.ndim else float(out)

    def directional_speed(self, gradE, theta: float) -> float:
        """Speed walking in direction theta on terrain with gradient gradE."""
        s_dot_g = math.cos(theta) * float(gradE[0]) + math.sin(theta) * float(gradE[1])
        return self.velocity(s_dot_g)
