"""Kernel backend selection.

``WINDLOOP_BACKEND`` picks the implementation at import time:
``numba`` (default when importable), ``numpy`` (pure fallback), or
``auto``.  Both backends expose the same functions with identical
integer semantics; see the module docstrings.
"""

from __future__ import annotations

import os

_requested = os.environ.get("WINDLOOP_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"WINDLOOP_BACKEND={_requested!r}: expected 'auto', 'numba' or 'numpy'"
    )

if _requested == "numpy":
    from . import numpy_impl as _impl
else:
    try:
        from . import numba_impl as _impl
    except ImportError:
        if _requested == "numba":
            raise
        from . import numpy_impl as _impl

BACKEND = _impl.BACKEND_NAME

gaussian_pairs = _impl.gaussian_pairs
scanline_winding = _impl.scanline_winding
winding_at_points = _impl.winding_at_points
curve_band_mask = _impl.curve_band_mask
grid_quadrant_winding = _impl.grid_quadrant_winding
occupation_mass = _impl.occupation_mass


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return BACKEND
