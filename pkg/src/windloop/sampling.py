"""Sampling of planar Brownian paths on dyadic grids.

Paths are built by midpoint refinement: the endpoint is a standard
normal pair, and each level-k refinement adds the conditional midpoint
of an interval of length 2**-(k-1), i.e. mean of the endpoints plus a
centred normal with variance 2**-(k+1) per coordinate.  All randomness
comes from a counter-based generator, so a path is a pure function of
(seed, levels) and refining a path never changes the points it already
has.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 finalisation round of a 64-bit integer."""
    z = x & _MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_child_seed(master_seed: int, replicate: int) -> int:
    """Seed for one replicate's stream; distinct replicates never collide."""
    if replicate < 0:
        raise ValueError("replicate must be non-negative")
    return splitmix64((master_seed ^ ((replicate + 1) * GOLDEN)) & _MASK64)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream: draw k is a pure function of (seed, k)."""

    seed: int
    stream_id: int = 0

    @classmethod
    def for_replicate(cls, master_seed: int, replicate: int) -> "RngStream":
        return cls(seed=derive_child_seed(master_seed, replicate),
                   stream_id=replicate)

    def raw(self, k: int) -> int:
        """64-bit output for counter k."""
        return splitmix64((self.seed + (k + 1) * GOLDEN) & _MASK64)

    def uniforms(self, first: int, count: int) -> np.ndarray:
        """count uniforms in (0,1) for counters first..first+count-1."""
        k = np.arange(first, first + count, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = (np.uint64(self.seed)
                 + (k + np.uint64(1)) * np.uint64(GOLDEN)).astype(np.uint64)
            z ^= z >> np.uint64(30)
            z *= np.uint64(0xBF58476D1CE4E5B9)
            z ^= z >> np.uint64(27)
            z *= np.uint64(0x94D049BB133111EB)
            z ^= z >> np.uint64(31)
        return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal_pairs(self, first_pair: int, n_pairs: int) -> np.ndarray:
        """(n_pairs, 2) standard normals; pair p uses counters 2p, 2p+1."""
        return _kernels.gaussian_pairs(
            np.uint64(self.seed), first_pair, n_pairs)


@dataclass(frozen=True)
class PlanarPath:
    """A planar path sampled at the dyadic times k / 2**levels.

    ``points`` has shape (2**levels + 1, 2) with points[0] == 0.  The
    associated closed loop appends the chord from points[-1] back to
    the origin.
    """

    levels: int
    times: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    seed: int | None = None

    @property
    def n_steps(self) -> int:
        return self.points.shape[0] - 1

    def __post_init__(self):
        n = 1 << self.levels
        if self.points.shape != (n + 1, 2):
            raise ValueError(
                f"points shape {self.points.shape} inconsistent with levels={self.levels}"
            )


def _fill_bridge(points: np.ndarray, levels: int, normals: np.ndarray) -> None:
    n = 1 << levels
    points[0] = 0.0
    points[n] = normals[0]
    for k in range(1, levels + 1):
        half = n >> k
        step = n >> (k - 1)
        idx = np.arange(half, n, step)
        first = 1 << (k - 1)
        g = normals[first:first + idx.shape[0]]
        std = math.sqrt(2.0 ** -(k + 1))
        points[idx] = 0.5 * (points[idx - half] + points[idx + half]) + std * g


def path_from_normals(levels: int, normals: np.ndarray) -> PlanarPath:
    """Bridge construction from an explicit (2**levels, 2) normal block.

    normals[0] drives the endpoint; normals[2**(k-1):2**k] drive the
    level-k midpoints in time order.  Exposed so tests can inject
    degenerate inputs (all zeros gives the zero path).
    """
    if levels < 0:
        raise ValueError("levels must be non-negative")
    n = 1 << levels
    normals = np.asarray(normals, dtype=np.float64)
    if normals.shape != (n, 2):
        raise ValueError(f"normals must have shape ({n}, 2), got {normals.shape}")
    points = np.empty((n + 1, 2), dtype=np.float64)
    _fill_bridge(points, levels, normals)
    return PlanarPath(levels=levels, times=np.arange(n + 1) / n, points=points)


def sample_bm(seed: int, levels: int) -> PlanarPath:
    """Sample a Brownian path at resolution 2**levels from one seed.

    Deterministic in (seed, levels), and consistent under refinement:
    sample_bm(seed, L).points[::2] equals sample_bm(seed, L-1).points
    exactly, because each dyadic point is driven by a fixed counter of
    the stream.
    """
    if not 0 <= levels <= 26:
        raise ValueError("levels must lie in [0, 26] (memory cap)")
    stream = RngStream(seed=seed)
    n = 1 << levels
    normals = stream.normal_pairs(0, n)
    points = np.empty((n + 1, 2), dtype=np.float64)
    _fill_bridge(points, levels, normals)
    return PlanarPath(levels=levels, times=np.arange(n + 1) / n,
                      points=points, seed=seed)


@dataclass(frozen=True)
class SubpathView:
    """The i-th of T equal dyadic pieces of a path (1-based, a view)."""

    parent: PlanarPath
    index: int
    count: int
    start: int
    stop: int

    @property
    def points(self) -> np.ndarray:
        return self.parent.points[self.start:self.stop + 1]


def subpath(path: PlanarPath, i: int, T: int) -> SubpathView:
    """Piece i of T equal dyadic pieces of a path, times [(i-1)/T, i/T].

    T must divide the step count 2**levels exactly and i runs 1..T;
    closing each piece with the chord back to its start gives the loops
    of the winding decomposition.
    """
    n = path.n_steps
    if T < 1 or n % T != 0:
        raise ValueError(f"T={T} does not divide the {n} path steps")
    if not 1 <= i <= T:
        raise ValueError(f"i={i} out of range 1..{T}")
    w = n // T
    return SubpathView(parent=path, index=i, count=T,
                       start=(i - 1) * w, stop=i * w)


def holder_norm(path: PlanarPath, alpha: float) -> float:
    """Hölder seminorm of the path over all dyadic spans.

    max over k <= levels and offsets of |X(s+h) - X(s)| / h**alpha with
    h = 2**-k, taking every start offset at each scale: a lower bound
    for the all-pairs supremum, exact on dyadic spans.  All spans are
    at most 1, so the value is non-decreasing in alpha.  O(n log n).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    pts = path.points
    n = path.n_steps
    best = 0.0
    for k in range(path.levels + 1):
        m = n >> k
        d = pts[m:] - pts[:pts.shape[0] - m]
        sup = math.sqrt(float(np.max(d[:, 0] ** 2 + d[:, 1] ** 2)))
        best = max(best, sup * 2.0 ** (k * alpha))
    return best
