"""Independent shortest-path baseline on a directed grid graph.

Edges use the slope between endpoint elevations (not the solver's sampled
gradient field) so the oracle genuinely cross-validates the PDE solver.
Costs are direction-dependent because the speed law is slope-asymmetric.
The graph restricts travel to a finite direction set, so oracle times
overestimate the continuous optimum by at most the stencil's metrication
bound (about 8.2% for 8 neighbors, 2.8% for 16).
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import ParameterError
from .mobility import MobilityModel
from .terrain import TerrainGrid

__all__ = ["STENCILS", "dijkstra_times", "dijkstra_path"]

_N8 = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
_N16 = _N8 + ((2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1))
STENCILS = {"n8": _N8, "n16": _N16}

_SPEED_FLOOR = 1e-300  # keeps edge costs finite when the speed law underflows


def _edge_graph(grid: TerrainGrid, model: MobilityModel, stencil: str) -> csr_matrix:
    try:
        offsets = STENCILS[stencil.lower()]
    except KeyError:
        raise ParameterError(f"unknown stencil {stencil!r}; use 'n8' or 'n16'") from None
    nx, ny = grid.nx, grid.ny
    E = grid.elevation
    gmag = np.hypot(grid.grad_x, grid.grad_y)
    node_ids = np.arange(nx * ny).reshape(nx, ny)

    rows, cols, costs = [], [], []
    for oi, oj in offsets:
        src_i = slice(max(0, -oi), nx - max(0, oi))
        src_j = slice(max(0, -oj), ny - max(0, oj))
        dst_i = slice(max(0, oi), nx - max(0, -oi))
        dst_j = slice(max(0, oj), ny - max(0, -oj))
        dist = np.hypot(oi * grid.dx, oj * grid.dy)
        slope = (E[dst_i, dst_j] - E[src_i, src_j]) / dist
        pen = model.penalization(0.5 * (gmag[src_i, src_j] + gmag[dst_i, dst_j]))
        speed = np.maximum(pen * model.velocity(slope), _SPEED_FLOOR)
        rows.append(node_ids[src_i, src_j].ravel())
        cols.append(node_ids[dst_i, dst_j].ravel())
        costs.append((dist / speed).ravel())
    return csr_matrix(
        (np.concatenate(costs), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nx * ny, nx * ny),
    )


def dijkstra_times(grid: TerrainGrid, model: MobilityModel, source,
                   stencil: str = "n16") -> np.ndarray:
    """Exact single-source shortest travel times to every node, (nx, ny)."""
    graph = _edge_graph(grid, model, stencil)
    src = _node_index(grid, source)
    times = _csgraph_dijkstra(graph, directed=True, indices=src)
    return times.reshape(grid.nx, grid.ny)


def dijkstra_path(grid: TerrainGrid, model: MobilityModel, source, target,
                  stencil: str = "n16") -> tuple[np.ndarray, float]:
    """Shortest route as a world-coordinate polyline, plus its travel time."""
    graph = _edge_graph(grid, model, stencil)
    src = _node_index(grid, source)
    tgt = _node_index(grid, target)
    times, pred = _csgraph_dijkstra(graph, directed=True, indices=src,
                                    return_predecessors=True)
    chain = [tgt]
    while chain[-1] != src:
        prev = pred[chain[-1]]
        if prev < 0:
            raise ParameterError("target unreachable from source")
        chain.append(int(prev))
    chain.reverse()
    pts = np.array([grid.node_xy(c // grid.ny, c % grid.ny) for c in chain])
    return pts, float(times[tgt])


def _node_index(grid: TerrainGrid, node) -> int:
    i, j = int(node[0]), int(node[1])
    if not (0 <= i < grid.nx and 0 <= j < grid.ny):
        raise ParameterError(f"node ({i}, {j}) outside the grid")
    return i * grid.ny + j
