"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
reference kernel is used.  Set ``ISLANDEA_BACKEND=python`` to force the
fallback.
"""
import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKENDS = {"python": _pykernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel

_requested = os.environ.get("ISLANDEA_BACKEND", "").strip().lower()
if _requested and _requested not in BACKENDS:
    raise ImportError(f"ISLANDEA_BACKEND={_requested!r} is not available; have {sorted(BACKENDS)}")
BACKEND = _requested or ("cython" if _ckernel is not None else "python")


def get(name=None):
    """Return the kernel module for ``name`` (default: the selected backend)."""
    return BACKENDS[name or BACKEND]
