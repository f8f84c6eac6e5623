"""Backend selection for the stream-scanning kernels.

Two interchangeable implementations exist:

* ``_stream_c``  — Cython-compiled core (built by setup.py when a C
  toolchain is available),
* ``stream_py``  — numpy fallback.

Both produce bit-identical results; only throughput differs.  Selection
happens once at import.  Set ``ENTROSTREAM_BACKEND=c`` or ``=py`` to force
one (``auto``/unset prefers the compiled core), e.g. for the benchmark in
benchmarks/backend_bench.py or to reproduce fallback behaviour in tests.
"""

from __future__ import annotations

import importlib
import os

from .tables import SymbolTable, build_table

__all__ = [
    "ACTIVE_BACKEND",
    "SymbolTable",
    "available_backends",
    "build_table",
    "kernels",
    "load_backend",
]

_NAMES = {"c": "_stream_c", "py": "stream_py"}


def load_backend(name: str):
    """Import one backend module by short name ('c' or 'py')."""
    try:
        return importlib.import_module(f".{_NAMES[name]}", __name__)
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected 'c' or 'py'") from None


def available_backends() -> list[str]:
    out = []
    for name in _NAMES:
        try:
            load_backend(name)
        except ImportError:
            continue
        out.append(name)
    return out


def _select():
    forced = os.environ.get("ENTROSTREAM_BACKEND", "auto").strip().lower()
    if forced in ("", "auto"):
        try:
            return "c", load_backend("c")
        except ImportError:
            return "py", load_backend("py")
    if forced in ("c", "compiled"):
        return "c", load_backend("c")
    if forced in ("py", "python", "numpy"):
        return "py", load_backend("py")
    raise RuntimeError(f"ENTROSTREAM_BACKEND={forced!r} not recognized (use c/py/auto)")


ACTIVE_BACKEND, kernels = _select()
