"""Select the compiled kernels when available, else the pure-Python ones.

Set ``JOINTSLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _purepy

MAX_KERNEL_PRIME = 2**31

if os.environ.get("JOINTSLAB_PURE_PYTHON") == "1":
    _impl = _purepy
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _purepy
        BACKEND = "python"

rref_mod_p = _impl.rref_mod_p
rainbow_triangles = _impl.rainbow_triangles
products_descent = _impl.products_descent
waterfill = _impl.waterfill
waterfill_weights = _impl.waterfill_weights
