"""Inner-loop kernels with a compiled core and a pure-Python fallback.

The compiled module is used when it imports; set ``DITER_BACKEND=python`` to
force the fallback.  ``BACKEND`` names the active implementation and
``load(name)`` returns either one explicitly (used by tests and benchmarks).
"""

import importlib
import os

_NAMES = ("diffuse_sequence", "sweep_chunk", "heap_build", "greedy_chunk",
          "gs_sweep", "jacobi_sweep", "geom_forward")


def load(name):
    if name == "cython":
        return importlib.import_module("diter._kernels._ckernels")
    if name == "python":
        return importlib.import_module("diter._kernels._pykernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def available():
    out = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        out.insert(0, "cython")
    return out


def _select():
    wanted = os.environ.get("DITER_BACKEND", "").strip().lower()
    if wanted == "python":
        return "python", load("python")
    try:
        return "cython", load("cython")
    except ImportError:
        if wanted == "cython":
            raise
        return "python", load("python")


BACKEND, _impl = _select()
globals().update({n: getattr(_impl, n) for n in _NAMES})

__all__ = ["BACKEND", "available", "load", *_NAMES]
