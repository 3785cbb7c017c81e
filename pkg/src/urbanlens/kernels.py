"""Kernel backend selection: compiled extension when present, numpy otherwise.

Set ``UL_PURE_PYTHON=1`` to force the numpy backend (used by the parity tests
and the benchmark).
"""

import os

if os.environ.get("UL_PURE_PYTHON", "") not in ("", "0"):
    from urbanlens import _kernels_py as _impl
else:
    try:
        from urbanlens import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from urbanlens import _kernels_py as _impl

BACKEND = _impl.BACKEND
query_range = _impl.query_range
points_in_polygon = _impl.points_in_polygon
points_polyline_distance = _impl.points_polyline_distance
bilinear = _impl.bilinear
terrain_first_hit = _impl.terrain_first_hit
