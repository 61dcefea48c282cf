"""Kernel backend selection.

The compiled Cython kernels are used when importable; otherwise the numpy
fallback takes over.  VERONESE_BACKEND={auto,c,py} overrides the choice.
"""

from __future__ import annotations

import os

from . import pykernels

_choice = os.environ.get("VERONESE_BACKEND", "auto").lower()

_impl = pykernels
HAVE_C = False
if _choice in ("auto", "c"):
    try:
        from . import ckernels as _c

        _impl = _c
        HAVE_C = True
    except ImportError:
        if _choice == "c":
            raise
elif _choice != "py":
    raise ValueError(f"VERONESE_BACKEND must be auto, c or py, not {_choice!r}")

BACKEND = "c" if HAVE_C else "python"

pivot_update = _impl.pivot_update
multilinear_max = _impl.multilinear_max
