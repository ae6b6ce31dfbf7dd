"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``OFDM_IM_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

from . import _pykernels

if os.environ.get("OFDM_IM_PURE_PYTHON", "") not in ("", "0"):
    _native = None
else:
    try:
        from . import _kernels as _native
    except ImportError:  # extension not built
        _native = None

BACKEND = "cython" if _native is not None else "python"
_impl = _native if _native is not None else _pykernels

ml_detect_batch = _impl.ml_detect_batch
trim_batch = _impl.trim_batch
