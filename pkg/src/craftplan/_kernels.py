"""Kernel dispatch: compiled ``_speedups`` when importable, pure Python otherwise.

Set ``CRAFTPLAN_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("CRAFTPLAN_PURE_PYTHON"):
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

aggregate = _impl.aggregate
reachable = _impl.reachable
trigram_cosine = _impl.trigram_cosine


def backends():
    """Every importable implementation, keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _speedups

        found["cython"] = _speedups
    except ImportError:
        pass
    return found
