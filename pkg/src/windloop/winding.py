"""Winding-number fields of closed polygonal loops on regular grids.

A loop is a vertex array with an implicit closing edge.  The winding
number of a point not on the loop is evaluated three independent ways
(scanline sweep, per-point crossing counts, quadrant-transition sums);
all are exact integer computations and must agree everywhere off the
curve.  Cells too close to the curve are flagged rather than trusted:
with the default margin of half a cell diagonal, every unflagged cell
has a single winding number over its whole area, which is what turns
cell counts into exact area brackets downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .sampling import PlanarPath


@dataclass(frozen=True)
class ClosedLoop:
    """Closed polygon: vertices (n, 2) plus the implicit edge back to
    vertices[0].  Repeated vertices and self-intersections are fine."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise ValueError(f"vertices must be (n>=1, 2), got {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def bounding_box(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))


@dataclass(frozen=True)
class GridSpec:
    """Regular grid of nx * ny cells over the box [x0, x1] x [y0, y1];
    cell centres sit at half-integer offsets: (x0 + (i+1/2) dx, ...)."""

    x0: float
    y0: float
    x1: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one cell per axis")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("grid box must have positive extent")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def centers_x(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    def centers_y(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    def contains_points(self, points: np.ndarray) -> bool:
        x = points[:, 0]
        y = points[:, 1]
        return bool((x >= self.x0).all() and (x <= self.x1).all()
                    and (y >= self.y0).all() and (y <= self.y1).all())

    @classmethod
    def cover(cls, bounds, nx: int, ny: int | None = None,
              pad_cells: int = 2) -> "GridSpec":
        """Grid of nx x ny cells over a bounding box, padded by whole
        cells on every side so the box never touches the grid edge."""
        if ny is None:
            ny = nx
        xmin, ymin, xmax, ymax = (float(b) for b in bounds)
        w = max(xmax - xmin, 1e-9)
        h = max(ymax - ymin, 1e-9)
        if nx <= 2 * pad_cells or ny <= 2 * pad_cells:
            raise ValueError("resolution too small for the requested padding")
        dx = w / (nx - 2 * pad_cells)
        dy = h / (ny - 2 * pad_cells)
        return cls(x0=xmin - pad_cells * dx, y0=ymin - pad_cells * dy,
                   x1=xmin - pad_cells * dx + nx * dx,
                   y1=ymin - pad_cells * dy + ny * dy,
                   nx=nx, ny=ny)


def default_band_eps(grid: GridSpec) -> float:
    """Half the cell diagonal: the smallest margin for which a cell
    centre farther than eps from the curve implies the whole cell is."""
    return 0.5 * math.hypot(grid.dx, grid.dy)


@dataclass(frozen=True)
class WindingField:
    """Winding numbers at all cell centres plus the near-curve flag."""

    grid: GridSpec
    theta: np.ndarray = field(repr=False)
    on_curve: np.ndarray = field(repr=False)
    band_eps: float = 0.0

    def __post_init__(self):
        shape = (self.grid.ny, self.grid.nx)
        if self.theta.shape != shape or self.on_curve.shape != shape:
            raise ValueError("field arrays must be shaped (ny, nx)")


def winding_field(loop: ClosedLoop, grid: GridSpec,
                  band_eps: float | None = None) -> WindingField:
    """Winding number at every cell centre by scanline sweep, with cells
    within band_eps (default: half cell diagonal) of the curve flagged."""
    if band_eps is None:
        band_eps = default_band_eps(grid)
    vx = np.ascontiguousarray(loop.vertices[:, 0])
    vy = np.ascontiguousarray(loop.vertices[:, 1])
    theta = _kernels.scanline_winding(vx, vy, grid.x0, grid.y0,
                                      grid.dx, grid.dy, grid.nx, grid.ny)
    on_curve = _kernels.curve_band_mask(vx, vy, grid.x0, grid.y0,
                                        grid.dx, grid.dy, grid.nx, grid.ny,
                                        band_eps)
    return WindingField(grid=grid, theta=theta, on_curve=on_curve,
                        band_eps=band_eps)


def winding_field_reference(loop: ClosedLoop, grid: GridSpec) -> np.ndarray:
    """Winding numbers at all cell centres by quadrant-transition sums.

    Independent of the crossing-rule kernels; same values off the curve,
    unreliable on it.  Slower; used as an oracle.
    """
    vx = np.ascontiguousarray(loop.vertices[:, 0])
    vy = np.ascontiguousarray(loop.vertices[:, 1])
    return _kernels.grid_quadrant_winding(vx, vy, grid.x0, grid.y0,
                                          grid.dx, grid.dy, grid.nx, grid.ny)


def winding_numbers_at(loop: ClosedLoop,
                       points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(winding numbers, exact on-edge flags) at arbitrary points."""
    pts = np.asarray(points, dtype=np.float64)
    vx = np.ascontiguousarray(loop.vertices[:, 0])
    vy = np.ascontiguousarray(loop.vertices[:, 1])
    return _kernels.winding_at_points(vx, vy,
                                      np.ascontiguousarray(pts[:, 0]),
                                      np.ascontiguousarray(pts[:, 1]))


def winding_number_point(loop: ClosedLoop, z) -> int:
    """Winding number of the loop around a single point.

    For a point exactly on an edge the crossing-rule value is still
    returned but is not meaningful; use ``winding_numbers_at`` to get
    the on-edge flag alongside the value.
    """
    theta, _ = winding_numbers_at(
        loop, np.asarray(z, dtype=np.float64).reshape(1, 2))
    return int(theta[0])


def close_path(path: PlanarPath) -> ClosedLoop:
    """The loop of a path: its vertices plus the chord back to the start."""
    return ClosedLoop(vertices=path.points)


def arc_cut_indices(n_steps: int, pieces: int) -> np.ndarray:
    """Vertex indices floor(i * n / pieces), i = 0..pieces, splitting a
    path of n steps into near-equal arcs (exactly equal when pieces | n)."""
    if pieces < 1:
        raise ValueError("pieces must be positive")
    if n_steps < pieces:
        raise ValueError(f"cannot cut {n_steps} steps into {pieces} pieces")
    i = np.arange(pieces + 1, dtype=np.int64)
    return (i * n_steps) // pieces


def chord_polygon(path: PlanarPath, pieces: int) -> ClosedLoop:
    """Polygon through the path's piece endpoints, closed back to the start.

    pieces must divide the step count; together with the piece loops of
    ``split_closed`` this reconstitutes the full loop's winding number.
    """
    n = path.n_steps
    if n % pieces != 0:
        raise ValueError(f"pieces={pieces} does not divide the {n} path steps")
    return ClosedLoop(vertices=path.points[::n // pieces])


def split_closed(vertices: np.ndarray,
                 cuts: np.ndarray) -> tuple[list[ClosedLoop], ClosedLoop]:
    """Split a closed-up vertex chain at given cuts.

    vertices is path-like: row 0 is the start, the last row the end, the
    closing edge implicit.  cuts must begin at 0 and end at the last
    index.  Returns the per-arc loops (each arc closed by its chord) and
    the chord polygon through the cut vertices.  Off all the curves, the
    winding number of the full loop equals the sum over the arc loops
    plus the chord polygon's: traversing arc + chord-back and then both
    chord directions cancels every inserted edge.
    """
    v = np.asarray(vertices, dtype=np.float64)
    cuts = np.asarray(cuts, dtype=np.int64)
    if cuts[0] != 0 or cuts[-1] != v.shape[0] - 1:
        raise ValueError("cuts must span the whole chain")
    if (np.diff(cuts) < 1).any():
        raise ValueError("cuts must be strictly increasing")
    arcs = [ClosedLoop(vertices=v[cuts[i]:cuts[i + 1] + 1])
            for i in range(cuts.shape[0] - 1)]
    return arcs, ClosedLoop(vertices=v[cuts])


def chord_winding_bound(pieces: int) -> int:
    """Max |winding| of a chord polygon on pieces+1 vertices: each of its
    pieces+1 edges turns by less than pi, so |winding| <= ceil((pieces+1)/2)."""
    return (pieces + 2) // 2
