"""Kernel backend selection, done once at import.

``ZOBENCH_BACKEND`` may be ``auto`` (default: compiled if importable),
``cython`` (compiled or ImportError) or ``python`` (numpy fallback).
"""

import os

from . import _pykernels

_choice = os.environ.get("ZOBENCH_BACKEND", "auto").strip().lower()

if _choice == "python":
    kernels = _pykernels
elif _choice == "cython":
    from . import _ckernels as kernels
elif _choice == "auto":
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels
else:
    raise ImportError(f"ZOBENCH_BACKEND must be auto, cython or python; got {_choice!r}")


def compiled_available() -> bool:
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True


def get(name: str | None = None):
    """Kernel module by name; ``None`` returns the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


BACKEND = kernels.NAME
