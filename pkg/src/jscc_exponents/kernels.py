"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy version.
Set ``JSCC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _core_py

if os.environ.get("JSCC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _core_py

BACKEND = "compiled" if _impl is not _core_py else "python"

arimoto_sweep = _impl.arimoto_sweep
blahut_arimoto = _impl.blahut_arimoto
simplex_grid_min = _impl.simplex_grid_min


def use_backend(name):
    """Switch backend at runtime ("compiled" or "python"); returns the previous name."""
    global _impl, BACKEND, arimoto_sweep, blahut_arimoto, simplex_grid_min
    prev = BACKEND
    if name == "python":
        _impl = _core_py
    elif name == "compiled":
        from . import _core as _impl
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    arimoto_sweep = _impl.arimoto_sweep
    blahut_arimoto = _impl.blahut_arimoto
    simplex_grid_min = _impl.simplex_grid_min
    return prev
