"""Elevation rasters: ingestion, synthesis, and bilinear field queries.

A :class:`TerrainGrid` is a uniform node-registered raster. Index ``[i, j]``
maps to world point ``(x0 + i*dx, y0 + j*dy)``, so y increases with j
(ESRI ASCII row order is flipped at load time). Node gradients are
precomputed once from the elevation with central differences (one-sided at
the boundary) and queried off-grid by bilinear interpolation, which keeps
the interpolated gradient field continuous across cell edges.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestionError, OutOfDomainError, ParameterError

__all__ = [
    "TerrainGrid",
    "load_esri_ascii",
    "write_esri_ascii",
    "synth",
]


@dataclass(frozen=True)
class TerrainGrid:
    """Immutable elevation raster with precomputed node gradients."""

    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple[float, float]
    elevation: np.ndarray          # (nx, ny), meters
    grad_x: np.ndarray = field(default=None, repr=False)
    grad_y: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ParameterError(f"grid must be at least 3x3, got {self.nx}x{self.ny}")
        if self.dx <= 0 or self.dy <= 0:
            raise ParameterError(f"cell sizes must be positive, got dx={self.dx}, dy={self.dy}")
        elev = np.asarray(self.elevation, dtype=float)
        if elev.shape != (self.nx, self.ny):
            raise ParameterError(
                f"elevation shape {elev.shape} does not match ({self.nx}, {self.ny})"
            )
        if not np.all(np.isfinite(elev)):
            raise IngestionError("elevation contains non-finite values")
        object.__setattr__(self, "elevation", elev)
        if self.grad_x is None or self.grad_y is None:
            gx = np.gradient(elev, self.dx, axis=0)
            gy = np.gradient(elev, self.dy, axis=1)
            object.__setattr__(self, "grad_x", gx)
            object.__setattr__(self, "grad_y", gy)
        self.elevation.setflags(write=False)
        self.grad_x.setflags(write=False)
        self.grad_y.setflags(write=False)

    # -- geometry ---------------------------------------------------------

    @property
    def x_max(self) -> float:
        return self.origin[0] + (self.nx - 1) * self.dx

    @property
    def y_max(self) -> float:
        return self.origin[1] + (self.ny - 1) * self.dy

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the node bounding box."""
        return (self.origin[0], self.origin[1], self.x_max, self.y_max)

    def node_xy(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin[0] + i * self.dx, self.origin[1] + j * self.dy)

    def contains(self, point) -> bool:
        x, y = float(point[0]), float(point[1])
        x0, y0, x1, y1 = self.bounds
        return x0 <= x <= x1 and y0 <= y <= y1

    def nearest_node(self, point) -> tuple[int, int]:
        i = int(round((point[0] - self.origin[0]) / self.dx))
        j = int(round((point[1] - self.origin[1]) / self.dy))
        return (min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1))

    def negated(self) -> "TerrainGrid":
        """View with E -> -E (gradients negated); used by reverse-mode solves."""
        return TerrainGrid(
            self.nx, self.ny, self.dx, self.dy, self.origin,
            -self.elevation, grad_x=-self.grad_x, grad_y=-self.grad_y,
        )

    # -- continuous queries -------------------------------------------------

    def _cell_frac(self, point):
        x, y = float(point[0]), float(point[1])
        x0, y0, x1, y1 = self.bounds
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            raise OutOfDomainError(
                f"point ({x}, {y}) outside grid bounds {self.bounds}"
            )
        fx = (x - x0) / self.dx
        fy = (y - y0) / self.dy
        i = min(int(fx), self.nx - 2)
        j = min(int(fy), self.ny - 2)
        return i, j, fx - i, fy - j

    def _bilinear(self, fld: np.ndarray, point) -> float:
        i, j, tx, ty = self._cell_frac(point)
        f00 = fld[i, j]
        f10 = fld[i + 1, j]
        f01 = fld[i, j + 1]
        f11 = fld[i + 1, j + 1]
        return (f00 * (1 - tx) * (1 - ty) + f10 * tx * (1 - ty)
                + f01 * (1 - tx) * ty + f11 * tx * ty)

    def sample_field(self, fld: np.ndarray, point) -> float:
        """Bilinear interpolation of an arbitrary (nx, ny) node field."""
        return self._bilinear(fld, point)

    def sample_elevation(self, point) -> float:
        """Bilinear elevation at a world point; exact at nodes."""
        return self._bilinear(self.elevation, point)

    def sample_gradient(self, point) -> np.ndarray:
        """Bilinear interpolation of the precomputed node gradient field."""
        return np.array([
            self._bilinear(self.grad_x, point),
            self._bilinear(self.grad_y, point),
        ])


# -- ESRI ASCII grid I/O ----------------------------------------------------

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def load_esri_ascii(source) -> TerrainGrid:
    """Read an ESRI ASCII grid from a path, file object, or text.

    The on-disk row order (first row = max y) is flipped so internal index
    (i, j) maps to (x0 + i*dx, y0 + j*dy). Any NODATA cell is rejected with
    the offending row/column named; silent filling would corrupt slopes.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        s = str(source)
        if "\n" in s or s.strip().lower().startswith("ncols"):
            text = s
        else:
            with open(s, "r") as f:
                text = f.read()

    tokens = text.split()
    header: dict[str, float] = {}
    pos = 0
    # Header lines: keyword value pairs until the first bare number.
    while pos < len(tokens):
        key = tokens[pos].lower()
        if key in _HEADER_KEYS or key == "nodata_value":
            if pos + 1 >= len(tokens):
                raise IngestionError(f"header key '{key}' missing its value")
            try:
                header[key] = float(tokens[pos + 1])
            except ValueError as exc:
                raise IngestionError(f"bad header value for '{key}': {tokens[pos + 1]}") from exc
            pos += 2
        else:
            break
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise IngestionError(f"malformed header: missing {', '.join(missing)}")

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols != header["ncols"] or nrows != header["nrows"] or ncols < 3 or nrows < 3:
        raise IngestionError(f"bad raster dimensions ncols={header['ncols']}, nrows={header['nrows']}")
    cellsize = header["cellsize"]
    if cellsize <= 0:
        raise IngestionError(f"cellsize must be positive, got {cellsize}")

    body = tokens[pos:]
    if len(body) != nrows * ncols:
        raise IngestionError(
            f"expected {nrows * ncols} cells ({nrows}x{ncols}), found {len(body)}"
        )
    try:
        values = np.array([float(t) for t in body], dtype=float)
    except ValueError as exc:
        raise IngestionError(f"non-numeric cell value: {exc}") from exc

    rows = values.reshape(nrows, ncols)  # rows[0] is the max-y line on disk
    if "nodata_value" in header:
        nodata = header["nodata_value"]
        bad = np.argwhere(rows == nodata)
        if bad.size:
            r, c = bad[0]
            raise IngestionError(
                f"NODATA cell at file row {r + 1}, column {c + 1}; "
                "fill or crop the raster before loading"
            )
    if not np.all(np.isfinite(rows)):
        r, c = np.argwhere(~np.isfinite(rows))[0]
        raise IngestionError(f"non-finite cell at file row {r + 1}, column {c + 1}")

    # flip to y-ascending, then transpose to (nx, ny) = (col, row) indexing
    elev = rows[::-1, :].T.copy()
    return TerrainGrid(
        nx=ncols, ny=nrows, dx=cellsize, dy=cellsize,
        origin=(header["xllcorner"], header["yllcorner"]),
        elevation=elev,
    )


def write_esri_ascii(grid: TerrainGrid, dest) -> None:
    """Write a grid as ESRI ASCII with 6 significant digits.

    Requires dx == dy (the format has a single cellsize). Writing then
    re-loading then re-writing is byte-identical.
    """
    if abs(grid.dx - grid.dy) > 1e-12 * max(grid.dx, grid.dy):
        raise ParameterError("ESRI ASCII requires square cells (dx == dy)")
    out = io.StringIO()
    out.write(f"ncols {grid.nx}\n")
    out.write(f"nrows {grid.ny}\n")
    out.write(f"xllcorner {grid.origin[0]:.6g}\n")
    out.write(f"yllcorner {grid.origin[1]:.6g}\n")
    out.write(f"cellsize {grid.dx:.6g}\n")
    rows = grid.elevation.T[::-1, :]  # back to disk order: first row = max y
    for r in range(rows.shape[0]):
        out.write(" ".join(f"{v:.6g}" for v in rows[r]))
        out.write("\n")
    text = out.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as f:
            f.write(text)


# -- synthetic terrains -------------------------------------------------------

def _geometry(nx, ny, dx, dy, origin):
    xs = origin[0] + dx * np.arange(nx)
    ys = origin[1] + dy * np.arange(ny)
    return np.meshgrid(xs, ys, indexing="ij")


def _check_center(center, nx, ny, dx, dy, origin):
    x0, y0 = origin
    if not (x0 <= center[0] <= x0 + (nx - 1) * dx and y0 <= center[1] <= y0 + (ny - 1) * dy):
        raise ParameterError(f"center {tuple(center)} outside the domain")


def synth(kind: str, *, nx: int, ny: int, dx: float = 1.0, dy: float = 1.0,
          origin: tuple[float, float] = (0.0, 0.0), **params) -> TerrainGrid:
    """Generate a synthetic terrain.

    Kinds:
      flat          E = height (default 0).
      gaussian_sum  E = sum of height*exp(-|x-c|^2 / (2 sigma^2)) bumps;
                    params: components = [(height, sigma, (cx, cy)), ...].
      cliff         tanh ramp of `height` between two plateaus at x=center_x
                    with horizontal scale `width`; optional lateral window
                    [y_lo, y_hi] with `fade` so a route exists around the face.
      saddle        two equal gaussian mountains separated by a pass;
                    params: height, sigma, centers ((x1,y1),(x2,y2)).
    """
    X, Y = _geometry(nx, ny, dx, dy, origin)

    if kind == "flat":
        height = float(params.pop("height", 0.0))
        if params:
            raise ParameterError(f"unknown flat params: {sorted(params)}")
        if height < 0:
            raise ParameterError("height must be >= 0")
        elev = np.full((nx, ny), height)

    elif kind == "gaussian_sum":
        components = params.pop("components", None)
        if params:
            raise ParameterError(f"unknown gaussian_sum params: {sorted(params)}")
        if not components:
            raise ParameterError("gaussian_sum needs at least one (height, sigma, center)")
        elev = np.zeros((nx, ny))
        for comp in components:
            h, sigma, center = comp
            if h < 0:
                raise ParameterError(f"gaussian height must be >= 0, got {h}")
            if sigma <= 0:
                raise ParameterError(f"gaussian sigma must be > 0, got {sigma}")
            _check_center(center, nx, ny, dx, dy, origin)
            r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
            elev = elev + h * np.exp(-r2 / (2.0 * sigma ** 2))

    elif kind == "cliff":
        height = float(params.pop("height", 20.0))
        center_x = params.pop("center_x", None)
        width = float(params.pop("width", 2.0))
        y_lo = params.pop("y_lo", None)
        y_hi = params.pop("y_hi", None)
        fade = float(params.pop("fade", 6.0))
        if params:
            raise ParameterError(f"unknown cliff params: {sorted(params)}")
        if height < 0:
            raise ParameterError("height must be >= 0")
        if width <= 0 or fade <= 0:
            raise ParameterError("width and fade must be > 0")
        if center_x is None:
            center_x = origin[0] + (nx - 1) * dx / 2.0
        _check_center((center_x, origin[1]), nx, ny, dx, dy, origin)
        ramp = 0.5 * (1.0 + np.tanh((X - center_x) / width))
        if y_lo is None and y_hi is None:
            window = 1.0
        else:
            if y_lo is None or y_hi is None or y_hi <= y_lo:
                raise ParameterError("cliff window needs y_lo < y_hi")
            window = 0.5 * (np.tanh((Y - y_lo) / fade) + np.tanh((y_hi - Y) / fade))
        elev = height * ramp * window

    elif kind == "saddle":
        height = float(params.pop("height", 40.0))
        sigma = float(params.pop("sigma", 15.0))
        centers = params.pop("centers", None)
        if params:
            raise ParameterError(f"unknown saddle params: {sorted(params)}")
        if height < 0:
            raise ParameterError("height must be >= 0")
        if sigma <= 0:
            raise ParameterError("sigma must be > 0")
        if centers is None:
            cx = origin[0] + (nx - 1) * dx / 2.0
            cy = origin[1] + (ny - 1) * dy / 2.0
            span = 30.0
            centers = ((cx, cy - span), (cx, cy + span))
        if len(centers) != 2:
            raise ParameterError("saddle needs exactly two centers")
        return synth(
            "gaussian_sum", nx=nx, ny=ny, dx=dx, dy=dy, origin=origin,
            components=[(height, sigma, centers[0]), (height, sigma, centers[1])],
        )

    else:
        raise ParameterError(f"unknown terrain kind '{kind}'")

    return TerrainGrid(nx=nx, ny=ny, dx=dx, dy=dy, origin=origin, elevation=elev)
