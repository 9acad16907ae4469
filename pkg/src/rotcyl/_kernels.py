"""Backend selection for the hot kernels.

The compiled extension is used when importable. Set ``ROTCYL_PURE_PYTHON=1``
to force the fallback (the benchmark and the backend-parity tests do this
through :func:`get_backend`).
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("ROTCYL_PURE_PYTHON") == "1" or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

rk4_arc = _BACKENDS[BACKEND].rk4_arc


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available_backends()}") from None
