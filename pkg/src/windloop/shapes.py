"""Deterministic loops with known winding fields, for exact tests.

All builders return path-like vertex arrays: row 0 is the start, the
last row returns to the start, and the closing edge (degenerate here)
is implicit.  This makes them directly usable both as ClosedLoop
vertices and as input to the arc-splitting machinery.
"""

from __future__ import annotations

import numpy as np

from .sampling import RngStream


def kfold_circle(n_edges: int, k: int = 1, radius: float = 1.0,
                 center=(0.0, 0.0)) -> np.ndarray:
    """Regular n_edges-gon traversed k times counterclockwise.

    Winding number is k strictly inside the polygon, 0 outside.
    n_edges is the per-revolution edge count; the array has
    n_edges*k + 1 rows, first and last equal.
    """
    if n_edges < 3 or k < 1:
        raise ValueError("need n_edges >= 3 and k >= 1")
    ang = 2.0 * np.pi * np.arange(n_edges * k + 1) / n_edges
    out = np.empty((n_edges * k + 1, 2), dtype=np.float64)
    out[:, 0] = center[0] + radius * np.cos(ang)
    out[:, 1] = center[1] + radius * np.sin(ang)
    out[-1] = out[0]
    return out


def figure_eight(n_edges: int = 64, radius: float = 1.0) -> np.ndarray:
    """Two tangent circles through the origin traversed with opposite
    orientations: winding +1 in the right lobe, -1 in the left."""
    if n_edges < 3:
        raise ValueError("need n_edges >= 3")
    # right lobe counterclockwise, centred (radius, 0), from the origin
    a1 = -np.pi + 2.0 * np.pi * np.arange(n_edges + 1) / n_edges
    right = np.stack([radius + radius * np.cos(a1),
                      radius * np.sin(a1)], axis=1)
    # left lobe clockwise, centred (-radius, 0), from the origin
    a2 = -2.0 * np.pi * np.arange(n_edges + 1) / n_edges
    left = np.stack([-radius + radius * np.cos(a2),
                     radius * np.sin(a2)], axis=1)
    out = np.concatenate([right, left[1:]], axis=0)
    out[0] = (0.0, 0.0)
    out[n_edges] = (0.0, 0.0)
    out[-1] = out[0]
    return out


def rectangle(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    """Axis-aligned rectangle, counterclockwise: winding 1 inside."""
    if not (x0 < x1 and y0 < y1):
        raise ValueError("need x0 < x1 and y0 < y1")
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]],
                    dtype=np.float64)


def random_loop(seed: int, n_edges: int, box_half: float = 3.0) -> np.ndarray:
    """Closed polyline with uniform random vertices in a centred box.

    Self-intersecting garbage by design: the stress corpus for the
    winding evaluators.  Deterministic in (seed, n_edges).
    """
    if n_edges < 3:
        raise ValueError("need n_edges >= 3")
    u = RngStream(seed=seed).uniforms(0, 2 * n_edges)
    pts = (2.0 * u.reshape(n_edges, 2) - 1.0) * box_half
    return np.concatenate([pts, pts[:1]], axis=0)
