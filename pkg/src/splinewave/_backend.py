"""Kernel backend selection.

The compiled extension is used when it imports; ``SPLINEWAVE_BACKEND=python``
forces the pure-Python kernels.  ``use_backend`` switches at runtime, which the
benchmark and the backend-equivalence tests rely on.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_active = _pykernels
if _ckernels is not None and os.environ.get("SPLINEWAVE_BACKEND", "").lower() != "python":
    _active = _ckernels


def kernels():
    return _active


def backend_name() -> str:
    return "cython" if _active is _ckernels else "python"


def available() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use_backend(name: str) -> None:
    global _active
    if name == "python":
        _active = _pykernels
    elif name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        _active = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
