"""Kernel backend selection.

The compiled extension is used when it imports; set
``GAMMA_FACTOR_PURE_PYTHON=1`` to force the NumPy fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

kernels = _kernels_py
if os.environ.get("GAMMA_FACTOR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        kernels = _kernels_py

NAME: str = kernels.NAME


def use(name: str) -> None:
    """Switch backend at runtime ("cython" or "python"); used by tests and benchmarks."""
    global kernels, NAME
    if name == "python":
        kernels = _kernels_py
    elif name == "cython":
        from . import _kernels

        kernels = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    NAME = kernels.NAME


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
