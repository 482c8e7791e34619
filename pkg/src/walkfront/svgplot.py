"""Hand-rolled SVG plots: elevation contours, front snapshots, styled paths.

No plotting dependency: contour polylines come from a small marching-squares
pass and everything is emitted as SVG path elements. Output contains no
timestamps, so identical inputs give identical files apart from nothing.
"""

from __future__ import annotations

import numpy as np

from .terrain import TerrainGrid

__all__ = ["marching_squares", "ScenePlot"]

# cluster palette, then representatives get darker strokes of the same hue
PATH_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
FRONT_COLOR = "#cc00cc"
CONTOUR_COLOR = "#999999"


def marching_squares(field: np.ndarray, level: float, grid: TerrainGrid) -> list:
    """Polylines (world coordinates) of the level contour of a node field."""
    f = np.asarray(field) - level
    nx, ny = f.shape
    segs = []

    def interp(pa, va, pb, vb):
        t = va / (va - vb)
        return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

    x0, y0 = grid.origin
    dx, dy = grid.dx, grid.dy
    for i in range(nx - 1):
        for j in range(ny - 1):
            v = (f[i, j], f[i + 1, j], f[i + 1, j + 1], f[i, j + 1])
            idx = sum(1 << k for k in range(4) if v[k] < 0.0)
            if idx == 0 or idx == 15:
                continue
            corners = (
                (x0 + i * dx, y0 + j * dy),
                (x0 + (i + 1) * dx, y0 + j * dy),
                (x0 + (i + 1) * dx, y0 + (j + 1) * dy),
                (x0 + i * dx, y0 + (j + 1) * dy),
            )
            # edge k joins corner k and corner (k+1) % 4
            pts = {}
            for k in range(4):
                a, b = k, (k + 1) % 4
                if (v[a] < 0.0) != (v[b] < 0.0):
                    pts[k] = interp(corners[a], v[a], corners[b], v[b])
            keys = sorted(pts)
            if len(keys) == 2:
                segs.append((pts[keys[0]], pts[keys[1]]))
            elif len(keys) == 4:
                # ambiguous saddle: split by the cell-center sign
                center = sum(v) / 4.0
                if (center < 0.0) == (v[0] < 0.0):
                    segs.append((pts[0], pts[3]))
                    segs.append((pts[1], pts[2]))
                else:
                    segs.append((pts[0], pts[1]))
                    segs.append((pts[2], pts[3]))
    return _chain_segments(segs)


def _chain_segments(segs: list) -> list:
    """Greedy chaining of segments into polylines by shared endpoints."""
    def key(p):
        return (round(p[0], 9), round(p[1], 9))

    by_end: dict = {}
    for si, (a, b) in enumerate(segs):
        by_end.setdefault(key(a), []).append(si)
        by_end.setdefault(key(b), []).append(si)

    used = [False] * len(segs)
    lines = []
    for start in range(len(segs)):
        if used[start]:
            continue
        used[start] = True
        a, b = segs[start]
        chain = [a, b]
        for head in (True, False):
            while True:
                p = chain[-1] if head else chain[0]
                nxt = None
                for si in by_end.get(key(p), ()):
                    if not used[si]:
                        nxt = si
                        break
                if nxt is None:
                    break
                used[nxt] = True
                sa, sb = segs[nxt]
                q = sb if key(sa) == key(p) else sa
                if head:
                    chain.append(q)
                else:
                    chain.insert(0, q)
        lines.append(chain)
    return lines


class ScenePlot:
    """Accumulates world-coordinate elements and renders one SVG document."""

    def __init__(self, bounds, width: int = 720, config_hash: str = ""):
        x0, y0, x1, y1 = bounds
        self.bounds = bounds
        self.scale = width / (x1 - x0)
        self.w = width
        self.h = int(round((y1 - y0) * self.scale))
        self.config_hash = config_hash
        self.elements: list[str] = []

    def _pt(self, p):
        x0, y0, x1, y1 = self.bounds
        return ((p[0] - x0) * self.scale, (y1 - p[1]) * self.scale)

    def _path_d(self, pts) -> str:
        cmds = []
        for k, p in enumerate(pts):
            sx, sy = self._pt(p)
            cmds.append(f"{'M' if k == 0 else 'L'}{sx:.2f},{sy:.2f}")
        return " ".join(cmds)

    def polyline(self, pts, color: str, width: float = 1.0, opacity: float = 1.0):
        if len(pts) < 2:
            return
        self.elements.append(
            f'<path d="{self._path_d(pts)}" fill="none" stroke="{color}" '
            f'stroke-width="{width:.2f}" stroke-opacity="{opacity:.2f}"/>'
        )

    def marker(self, p, color: str, radius: float = 4.0, cross: bool = False):
        sx, sy = self._pt(p)
        if cross:
            r = radius
            self.elements.append(
                f'<path d="M{sx - r:.2f},{sy:.2f} L{sx + r:.2f},{sy:.2f} '
                f'M{sx:.2f},{sy - r:.2f} L{sx:.2f},{sy + r:.2f}" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
        else:
            self.elements.append(
                f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="{radius:.2f}" '
                f'fill="none" stroke="{color}" stroke-width="1.5"/>'
            )

    def elevation_contours(self, grid: TerrainGrid, n_levels: int = 10):
        lo, hi = float(grid.elevation.min()), float(grid.elevation.max())
        if hi - lo < 1e-12:
            return
        for level in np.linspace(lo, hi, n_levels + 2)[1:-1]:
            for line in marching_squares(grid.elevation, level, grid):
                self.polyline(line, CONTOUR_COLOR, 0.8, 0.7)

    def front(self, grid: TerrainGrid, phi: np.ndarray, width: float = 1.2):
        for line in marching_squares(phi, 0.0, grid):
            self.polyline(line, FRONT_COLOR, width, 0.85)

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" '
            f'height="{self.h}" viewBox="0 0 {self.w} {self.h}">\n'
            f"<!-- config: {self.config_hash} -->\n"
            f'<rect width="{self.w}" height="{self.h}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.elements) + "\n</svg>\n"

    def write(self, path):
        with open(path, "w") as f:
            f.write(self.render())
