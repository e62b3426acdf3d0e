"""Selects the Cauchy-sum kernel at import time.

The compiled extension is used when it was built; setting the
environment variable ``VEKUA_BERGMAN_PURE=1`` forces the numpy fallback.
"""

import os

from . import _cauchy_py

if os.environ.get("VEKUA_BERGMAN_PURE", "") not in ("", "0"):
    cauchy_sum = _cauchy_py.cauchy_sum
    BACKEND = "python"
else:
    try:
        from ._cauchy import cauchy_sum
        BACKEND = "cython"
    except ImportError:  # extension not built
        cauchy_sum = _cauchy_py.cauchy_sum
        BACKEND = "python"

__all__ = ["cauchy_sum", "BACKEND"]
