"""Kernel backend selection: the compiled extension when built, NumPy otherwise.

Set SLICEROOM_KERNELS=numpy (or =cython) to force a backend; the default
"auto" prefers the compiled one.  Both produce bit-identical results.
"""
from __future__ import annotations

import os

_choice = os.environ.get("SLICEROOM_KERNELS", "auto").strip().lower() or "auto"
if _choice not in ("auto", "cython", "numpy"):
    raise ValueError(f"SLICEROOM_KERNELS must be auto, cython or numpy, got {_choice!r}")

if _choice == "numpy":
    from . import _slicing_np as _impl
    BACKEND = "numpy"
elif _choice == "cython":
    from . import _slicing_cy as _impl  # type: ignore[no-redef]
    BACKEND = "cython"
else:
    try:
        from . import _slicing_cy as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        from . import _slicing_np as _impl
        BACKEND = "numpy"

signed_distances = _impl.signed_distances
classify_centroid = _impl.classify_centroid
classify_any_vertex = _impl.classify_any_vertex
triangle_cross_products = _impl.triangle_cross_products
