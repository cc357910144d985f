"""Hot-kernel dispatch: compiled extension when available, numpy otherwise.

Set the environment variable ``SLD_KERNEL_BACKEND=python`` (or ``compiled``)
to force a backend, or call :func:`use` at runtime.
"""

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels

    _BACKENDS["compiled"] = _ckernels
except ImportError:
    _ckernels = None

_forced = os.environ.get("SLD_KERNEL_BACKEND")
if _forced:
    if _forced not in _BACKENDS:
        raise ImportError(
            f"SLD_KERNEL_BACKEND={_forced!r} unavailable; have {sorted(_BACKENDS)}"
        )
    _active = _forced
else:
    _active = "compiled" if "compiled" in _BACKENDS else "python"


def available_backends():
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _active


def use(name: str) -> str:
    """Switch backend; returns the previously active name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    previous = _active
    _active = name
    return previous


def best_cos2(directions, codebook):
    return _BACKENDS[_active].best_cos2(directions, codebook)


def max_offdiag_correlation(vectors):
    return _BACKENDS[_active].max_offdiag_correlation(vectors)


def worst_pair(vectors):
    return _BACKENDS[_active].worst_pair(vectors)
