"""Areas and measures derived from winding fields.

Threshold sets (cells winding at least N, or two subloops both winding
at least M in absolute value) are counted two ways everywhere: once
over cells clear of the curve, once including the near-curve band.  The
truth lies between, since off-band cells carry a single winding number
across their whole area.  Occupation mass and path-time integrals give
the limit side of the convergence checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels
from .sampling import PlanarPath
from .winding import GridSpec, WindingField


class AreaPair(NamedTuple):
    """The same quantity with near-curve cells excluded / included."""

    off_curve: float
    inclusive: float


@dataclass(frozen=True)
class TestFunction:
    """Bounded test function with the constants its error bounds need."""

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    sup_norm: float
    lipschitz: float = math.inf

    def __call__(self, x, y):
        return self.fn(np.asarray(x, dtype=np.float64),
                       np.asarray(y, dtype=np.float64))

    def modulus(self, t: float) -> float:
        """Upper bound min(2 sup, L t) for the modulus of continuity."""
        if t < 0:
            raise ValueError("modulus argument must be nonnegative")
        if t == 0.0:
            return 0.0
        if math.isfinite(self.lipschitz):
            return min(2.0 * self.sup_norm, self.lipschitz * t)
        return 2.0 * self.sup_norm


def constant_fn(c: float = 1.0, name: str | None = None) -> TestFunction:
    return TestFunction(name=name or f"const{c:g}",
                        fn=lambda x, y: (x * 0.0) + (y * 0.0) + c,
                        sup_norm=abs(c), lipschitz=0.0)


def gaussian_bump(center=(0.0, 0.0), sigma: float = 1.0,
                  name: str | None = None) -> TestFunction:
    """exp(-|z - c|^2 / (2 sigma^2)): sup 1, Lipschitz e^{-1/2}/sigma."""
    cx, cy = float(center[0]), float(center[1])
    s2 = 2.0 * sigma * sigma

    def fn(x, y):
        return np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / s2)

    return TestFunction(name=name or "gauss", fn=fn, sup_norm=1.0,
                        lipschitz=math.exp(-0.5) / sigma)


def cosine_fn(name: str = "coscos") -> TestFunction:
    """cos(x) cos(y): sup 1, Lipschitz 1, sign-changing."""
    return TestFunction(name=name, fn=lambda x, y: np.cos(x) * np.cos(y),
                        sup_norm=1.0, lipschitz=1.0)


@dataclass(frozen=True)
class ThresholdSet:
    """Cells past a winding threshold.

    mode 'one_sided': one field, theta >= threshold.
    mode 'pair_abs': two fields, |theta_a| >= threshold and
    |theta_b| >= threshold.  Membership is decided per cell from the
    stored fields; the near-curve band is the union of the fields'.
    """

    fields: tuple[WindingField, ...]
    threshold: int
    mode: str = "one_sided"

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be a positive integer")
        want = {"one_sided": 1, "pair_abs": 2}.get(self.mode)
        if want is None:
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.fields) != want:
            raise ValueError(f"mode {self.mode!r} needs {want} field(s)")
        g0 = self.fields[0].grid
        if any(f.grid != g0 for f in self.fields[1:]):
            raise ValueError("fields must share one grid")

    @property
    def grid(self) -> GridSpec:
        return self.fields[0].grid

    def member_mask(self) -> np.ndarray:
        if self.mode == "one_sided":
            return self.fields[0].theta >= self.threshold
        a, b = self.fields
        return ((np.abs(a.theta) >= self.threshold)
                & (np.abs(b.theta) >= self.threshold))

    def band_mask(self) -> np.ndarray:
        out = self.fields[0].on_curve.copy()
        for f in self.fields[1:]:
            out |= f.on_curve
        return out


def threshold_area(tset: ThresholdSet) -> AreaPair:
    """Member-cell count times cell area, off-band and band-inclusive."""
    member = tset.member_mask()
    band = tset.band_mask()
    ca = tset.grid.cell_area
    return AreaPair(off_curve=float((member & ~band).sum()) * ca,
                    inclusive=float(member.sum()) * ca)


def f_measure(tset: ThresholdSet, f: TestFunction) -> AreaPair:
    """Midpoint quadrature of f over the member cells.

    (sum of centre values) * cell_area, so that f == 1 reproduces
    threshold_area bit for bit.
    """
    member = tset.member_mask()
    band = tset.band_mask()
    grid = tset.grid
    cx = grid.centers_x()
    cy = grid.centers_y()
    jj, ii = np.nonzero(member)
    vals = f(cx[ii], cy[jj])
    off = float(vals[~band[jj, ii]].sum()) * grid.cell_area
    inc = float(vals.sum()) * grid.cell_area
    return AreaPair(off_curve=off, inclusive=inc)


def mu_N_f(field: WindingField, N: int, f: TestFunction) -> AreaPair:
    """The rescaled winding measure applied to f: 2 pi N times the
    f-quadrature over cells winding at least N."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    pair = f_measure(ThresholdSet(fields=(field,), threshold=N), f)
    return AreaPair(off_curve=2.0 * math.pi * N * pair.off_curve,
                    inclusive=2.0 * math.pi * N * pair.inclusive)


@dataclass(frozen=True)
class OccupationHistogram:
    """Time the path spends per cell; masses sum to 1."""

    grid: GridSpec
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.mass.shape != (self.grid.ny, self.grid.nx):
            raise ValueError("mass must be shaped (ny, nx)")

    def integral(self, f: TestFunction) -> float:
        cx = self.grid.centers_x()
        cy = self.grid.centers_y()
        jj, ii = np.nonzero(self.mass)
        return float((f(cx[ii], cy[jj]) * self.mass[jj, ii]).sum())


def occupation_measure(path: PlanarPath, grid: GridSpec) -> OccupationHistogram:
    """Histogram of the time the path spends in each grid cell.

    Each segment's time increment 2**-levels is split over the cells it
    traverses, proportionally to clipped length.
    """
    if not grid.contains_points(path.points):
        raise ValueError("path exits the grid; enlarge the grid box")
    px = np.ascontiguousarray(path.points[:, 0])
    py = np.ascontiguousarray(path.points[:, 1])
    mass = _kernels.occupation_mass(px, py, grid.x0, grid.y0,
                                    grid.dx, grid.dy, grid.nx, grid.ny,
                                    2.0 ** -path.levels)
    return OccupationHistogram(grid=grid, mass=mass)


def nu_f(path: PlanarPath, f: TestFunction) -> float:
    """Time integral of f along the path: left-endpoint Riemann sum over
    the dyadic time grid.  The reference value for convergence checks."""
    pts = path.points
    vals = f(pts[:-1, 0], pts[:-1, 1])
    return float(vals.sum()) * 2.0 ** -path.levels
