"""Kernel backend selection: compiled extension when available, else pure Python.

Set the environment variable ``SWEEPJOIN_BACKEND=python`` (or ``compiled``)
to force the default; callers can also pass an explicit backend name through
``JoinConfig.backend`` or the ``--backend`` CLI flag.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # extension not built; pure Python still works
    _kernels = None

_BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if _kernels is not None:
    _BACKENDS["compiled"] = _kernels


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def default_backend() -> str:
    forced = os.environ.get("SWEEPJOIN_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ValueError(
                f"SWEEPJOIN_BACKEND={forced!r} not available; "
                f"choose from {available_backends()}"
            )
        return forced
    return "compiled" if "compiled" in _BACKENDS else "python"


def get_kernels(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` (default backend when None)."""
    if name is None:
        name = default_backend()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None
