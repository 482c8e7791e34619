"""CSV export/import of node fields (arrival times, phi snapshots).

Layout: comment header lines carrying the grid geometry and any extra
metadata, then ny data lines in ascending y order, each with nx
whitespace-separated values in ascending x order. NaN marks unset cells.
"""

from __future__ import annotations

import numpy as np

from .errors import IngestionError
from .terrain import TerrainGrid

__all__ = ["write_grid_csv", "read_grid_csv"]

_FMT = "%.12g"


def write_grid_csv(dest, grid: TerrainGrid, values: np.ndarray,
                   meta: dict | None = None) -> None:
    values = np.asarray(values)
    if values.shape != (grid.nx, grid.ny):
        raise ValueError(f"field shape {values.shape} != grid ({grid.nx}, {grid.ny})")
    lines = [
        f"# nx={grid.nx} ny={grid.ny} dx={grid.dx:.12g} dy={grid.dy:.12g} "
        f"x0={grid.origin[0]:.12g} y0={grid.origin[1]:.12g}"
    ]
    for key, val in (meta or {}).items():
        lines.append(f"# {key}={val}")
    for j in range(grid.ny):
        lines.append(" ".join(_FMT % v for v in values[:, j]))
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as f:
            f.write(text)


def read_grid_csv(source) -> tuple[dict, np.ndarray]:
    """Return (metadata, field) with the field shaped (nx, ny)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r") as f:
            text = f.read()
    meta: dict[str, str] = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        rows.append([float(t) for t in line.split()])
    if not rows:
        raise IngestionError("grid CSV has no data lines")
    arr = np.array(rows)  # (ny, nx)
    if "nx" in meta and "ny" in meta:
        if arr.shape != (int(meta["ny"]), int(meta["nx"])):
            raise IngestionError(
                f"grid CSV body {arr.shape} does not match header "
                f"nx={meta['nx']} ny={meta['ny']}"
            )
    return meta, arr.T.copy()
