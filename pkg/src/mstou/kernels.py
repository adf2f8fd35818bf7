"""Selects the field accumulation backend at import.

The compiled extension is used when it was built; setting
``MSTOU_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _field_py

BACKEND = "python"
accumulate = _field_py.accumulate

if os.environ.get("MSTOU_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _field_kernel
    except ImportError:
        pass
    else:
        accumulate = _field_kernel.accumulate
        BACKEND = "cython"


def backends() -> dict:
    """All importable backends by name."""
    found = {"python": _field_py.accumulate}
    try:
        from . import _field_kernel
    except ImportError:
        return found
    found["cython"] = _field_kernel.accumulate
    return found
