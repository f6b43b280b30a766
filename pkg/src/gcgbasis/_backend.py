"""Hot-kernel backend selection.

The enumeration and block-assembly inner loops exist twice: a compiled Cython
extension (``gcgbasis._kernels``) and a pure-Python/numpy fallback
(``gcgbasis._kernels_py``).  The compiled one is picked when importable;
set ``GCGBASIS_BACKEND=py`` or ``=c`` to force a choice.
"""

from __future__ import annotations

import os

_forced = os.environ.get("GCGBASIS_BACKEND", "").strip().lower()

if _forced == "py":
    from . import _kernels_py as impl

    BACKEND = "python"
elif _forced == "c":
    from . import _kernels as impl  # raises if the extension was not built

    BACKEND = "compiled"
else:
    try:
        from . import _kernels as impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as impl

        BACKEND = "python"


def get_impl(name: str | None = None):
    """Return a backend module by name ('compiled'/'c', 'python'/'py', None=current)."""
    if name in (None, "", "auto"):
        return impl
    if name in ("compiled", "c"):
        from . import _kernels

        return _kernels
    if name in ("python", "py"):
        from . import _kernels_py

        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")
