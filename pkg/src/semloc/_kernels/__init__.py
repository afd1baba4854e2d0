"""Kernel backend selection.

Three hot kernels (walk counting, candidate compatibility, maximal
clique enumeration) exist twice: a compiled Cython extension and a pure
NumPy/Python fallback with identical semantics. The compiled one is
preferred when the build produced it; set SEMLOC_BACKEND=python or
SEMLOC_BACKEND=native to force a choice (forcing native raises if the
extension is missing). The active module is re-exported here.
"""

from __future__ import annotations

import os

from . import _pure

_requested = os.environ.get("SEMLOC_BACKEND", "").strip().lower()
if _requested not in ("", "native", "python"):
    raise RuntimeError(f"SEMLOC_BACKEND must be 'native' or 'python', got {_requested!r}")

if _requested == "python":
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "native":
            raise RuntimeError("SEMLOC_BACKEND=native but the compiled extension is not available")
        _impl = _pure

BACKEND = _impl.BACKEND_NAME
walk_suffix_counts = _impl.walk_suffix_counts
compat_matrix = _impl.compat_matrix
max_cliques = _impl.max_cliques


def available_backends() -> tuple[str, ...]:
    names = ["python"]
    try:
        from . import _native  # noqa: F401
        names.insert(0, "native")
    except ImportError:
        pass
    return tuple(names)


def get_backend(name: str):
    """Fetch a backend module by name (for benchmarks and equivalence tests)."""
    if name == "python":
        return _pure
    if name == "native":
        from . import _native
        return _native
    raise ValueError(f"unknown backend {name!r}")


def use_backend(name: str) -> str:
    """Rebind the active kernels at runtime (benchmark plumbing).

    Callers go through module attributes, so rebinding here switches
    every consumer at once. Returns the previously active backend name.
    """
    global _impl, BACKEND, walk_suffix_counts, compat_matrix, max_cliques
    previous = BACKEND
    _impl = get_backend(name)
    BACKEND = _impl.BACKEND_NAME
    walk_suffix_counts = _impl.walk_suffix_counts
    compat_matrix = _impl.compat_matrix
    max_cliques = _impl.max_cliques
    return previous
