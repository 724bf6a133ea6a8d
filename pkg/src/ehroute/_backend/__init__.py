"""Kernel backend selection.

The hot search loops exist twice: a Cython/C++ extension (``_ckern``)
built at install time, and a pure-Python mirror (``pure``) that is always
available.  Both expose the same functions with identical deterministic
behavior; parity tests compare them output-for-output.  The environment
variable EHROUTE_BACKEND (``compiled`` or ``pure``) overrides the default
choice of the compiled one when present.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _ckern as compiled
except ImportError:  # extension not built; pure fallback only
    compiled = None  # type: ignore[assignment]


def available_backends() -> tuple[str, ...]:
    return ("compiled", "pure") if compiled is not None else ("pure",)


def resolve_backend(name: str | None = None) -> str:
    if name is None or name == "auto":
        name = os.environ.get("EHROUTE_BACKEND") or (
            "compiled" if compiled is not None else "pure"
        )
    if name not in ("compiled", "pure"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and compiled is None:
        raise RuntimeError("compiled backend requested but the extension is not built")
    return name


def kernels(name: str | None = None):
    return compiled if resolve_backend(name) == "compiled" else pure


def worker_count(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("EHROUTE_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)
