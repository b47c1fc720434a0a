"""Pick the compiled core when it is importable, else the numpy fallback.

Set ``LPMLAB_BACKEND=python`` to force the fallback (``cython`` to require
the compiled core).
"""
from __future__ import annotations

import os

from . import _fallback

_choice = os.environ.get("LPMLAB_BACKEND", "auto").lower()
if _choice not in {"auto", "cython", "python"}:
    raise ImportError(f"LPMLAB_BACKEND must be auto, cython or python, not {_choice!r}")

_core = None
if _choice != "python":
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "cython":
            raise

impl = _core if _core is not None else _fallback
BACKEND = "cython" if _core is not None else "python"
BACKENDS = {"python": _fallback} | ({"cython": _core} if _core is not None else {})

KIND_ER = _fallback.KIND_ER
KIND_GAUSSIAN = _fallback.KIND_GAUSSIAN
KIND_LOGISTIC = _fallback.KIND_LOGISTIC
KIND_LPMRE = _fallback.KIND_LPMRE
