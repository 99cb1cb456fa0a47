"""Backend selection for the replicate-counting kernels.

The compiled extension (``gatekeep._ckernels``, built from Cython) is used
when importable; otherwise the numpy fallback takes over.  Set
``GATEKEEP_BACKEND=c`` or ``GATEKEEP_BACKEND=python`` to force one
explicitly (forcing an unavailable backend raises).  Both backends are
bitwise-equivalent, so the choice only affects speed; see
``benchmarks/kernel_bench.py``.
"""

from __future__ import annotations

import os

from . import _pykernels
from .errors import DomainError

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["c"] = _ckernels


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _default() -> str:
    env = os.environ.get("GATEKEEP_BACKEND")
    if env:
        if env not in _BACKENDS:
            raise DomainError(
                "UNKNOWN_BACKEND",
                f"GATEKEEP_BACKEND={env!r} is not available; "
                f"choose from {available_backends()}",
            )
        return env
    return "c" if "c" in _BACKENDS else "python"


_active = _default()


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise DomainError(
            "UNKNOWN_BACKEND",
            f"backend {name!r} is not available; choose from {available_backends()}",
        )
    _active = name


def get(name: str | None = None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    if name is None:
        name = _active
    if name not in _BACKENDS:
        raise DomainError(
            "UNKNOWN_BACKEND",
            f"backend {name!r} is not available; choose from {available_backends()}",
        )
    return _BACKENDS[name]
