"""Hot numeric kernels.

The numba path is used when numba imports cleanly and the environment
variable ``CFLEVELS_DISABLE_NUMBA`` is unset (or ``0``). Both paths are
importable directly as ``numpy_impl`` and ``numba_impl`` for testing and
benchmarking.
"""
import os

from . import _numpy as numpy_impl

try:
    from . import _numba as numba_impl
except ImportError:  # numba missing or broken
    numba_impl = None

_disabled = os.environ.get("CFLEVELS_DISABLE_NUMBA", "0") not in ("", "0")

if numba_impl is not None and not _disabled:
    BACKEND = "numba"
    _impl = numba_impl
else:
    BACKEND = "numpy"
    _impl = numpy_impl

continuant_levels = _impl.continuant_levels
log_partition = _impl.log_partition
collocation_matrix = _impl.collocation_matrix

__all__ = ["BACKEND", "numpy_impl", "numba_impl",
           "continuant_levels", "log_partition", "collocation_matrix"]
