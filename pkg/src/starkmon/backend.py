"""Stepping-kernel backend selection.

Two interchangeable implementations of advance_block exist: the compiled
Cython extension (starkmon._core) and the pure-numpy fallback
(starkmon._kernel_py).  The compiled one is picked when importable; set

    STARKMON_BACKEND=python|compiled|auto

to override.  Within one backend, trajectories are bitwise reproducible;
across backends they agree to rounding (different QR codepaths), which
the test suite pins at the observable level.
"""

from __future__ import annotations

import os

from .model import ConfigurationError

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

from . import _kernel_py as _python


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _compiled is not None else ("python",)


def _resolve(name: str | None) -> str:
    if name is None:
        name = os.environ.get("STARKMON_BACKEND", "auto").strip().lower() or "auto"
    if name == "auto":
        return "compiled" if _compiled is not None else "python"
    if name not in ("compiled", "python"):
        raise ConfigurationError(f"unknown backend {name!r}")
    if name == "compiled" and _compiled is None:
        raise ConfigurationError("compiled backend requested but starkmon._core is not built")
    return name


def active_backend() -> str:
    return _resolve(None)


def get_kernel(name: str | None = None):
    """Return the advance_block callable for `name` (default: active)."""
    resolved = _resolve(name)
    return _compiled.advance_block if resolved == "compiled" else _python.advance_block
