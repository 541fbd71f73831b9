"""Kernel backend selection.

Imports the compiled `_ckernels` extension when present, otherwise the pure
NumPy/Python mirror `_kernels_py`.  Setting the environment variable
``THRESHOLDWINDOW_FORCE_PY=1`` before import forces the pure backend (used by
the benchmark and backend-equality tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("THRESHOLDWINDOW_FORCE_PY") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

NEIGHBOR_OFFSETS = _kernels_py.NEIGHBOR_OFFSETS

percolation_flip_time = _impl.percolation_flip_time
crossing_exists = _impl.crossing_exists
bridging_pivotal_count = _impl.bridging_pivotal_count
dynamical_first_crossing = _impl.dynamical_first_crossing
itermaj_flip_time = _impl.itermaj_flip_time
connectivity_flip_time = _impl.connectivity_flip_time
triangle_flip_time = _impl.triangle_flip_time
max_window_value = _impl.max_window_value
window_flip_times = _impl.window_flip_times


def get_backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
