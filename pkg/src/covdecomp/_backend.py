"""Pick the compiled kernels when available, else the NumPy fallback.

Set ``COVDECOMP_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py


def _load_compiled():
    if os.environ.get("COVDECOMP_PURE", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
kernels = _compiled if _compiled is not None else _kernels_py
BACKEND = "compiled" if _compiled is not None else "python"


def available_backends():
    """Mapping of backend name to kernel module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        return out
    out["compiled"] = _kernels
    return out
