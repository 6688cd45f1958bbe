"""Hot-kernel backend selection.

The power-control fixed point is the one scalar-sequential inner loop in
the solver, so it has a compiled implementation with a pure-NumPy fallback.
The compiled module is used when importable; set CFMAXMIN_BACKEND=python
(or =cython) to force a choice at import, or call ``set_backend`` at
runtime (used by the benchmark).
"""

from __future__ import annotations

import os

from . import _fixed_point_py

try:
    from . import _fixed_point_cy
except ImportError:  # pragma: no cover - depends on the build environment
    _fixed_point_cy = None

_BACKENDS = {"python": _fixed_point_py}
if _fixed_point_cy is not None:
    _BACKENDS["cython"] = _fixed_point_cy


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})") from None


def set_backend(name: str) -> None:
    """Switch the active kernel backend."""
    global _active, BACKEND_NAME
    _active = get_backend(name)
    BACKEND_NAME = name


def fixed_point_iterate(coupling, noise, p_max, t, tol, max_iters):
    return _active.fixed_point_iterate(coupling, noise, p_max, t, tol, max_iters)


BACKEND_NAME = os.environ.get("CFMAXMIN_BACKEND") or (
    "cython" if _fixed_point_cy is not None else "python")
_active = get_backend(BACKEND_NAME)
