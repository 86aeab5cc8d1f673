"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``PPK_PURE_PYTHON=1``
to force the pure-Python implementation.
"""
from __future__ import annotations

import os

from . import _purekernels as python_backend

compiled_backend = None
if not os.environ.get("PPK_PURE_PYTHON"):
    try:
        from . import _speedups as compiled_backend  # type: ignore[no-redef]
    except ImportError:
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

box_iou = _active.box_iou
iou_matrix = _active.iou_matrix
greedy_assign = _active.greedy_assign
paint_disk = _active.paint_disk

__all__ = ["BACKEND", "box_iou", "iou_matrix", "greedy_assign", "paint_disk",
           "python_backend", "compiled_backend"]
