"""Select the path-ordered product kernel at import time.

The compiled extension is used when present; the pure-NumPy fallback is
semantically identical (both are exercised by the test suite).  Set
HOLOGATE_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HOLOGATE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

COMPILED: bool = _impl.COMPILED
ordered_expm_product = _impl.ordered_expm_product
