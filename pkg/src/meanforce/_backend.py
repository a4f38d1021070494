"""Kernel backend selection.

The compiled extension ``_kernels_cy`` is preferred; the pure-NumPy module
``_kernels_py`` is a drop-in fallback.  Set ``MEANFORCE_PURE=1`` to force the
fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("MEANFORCE_PURE", "0") == "1":
    _impl = _kernels_py
    BACKEND = "pure"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "pure"

jacobi_eigh_real = _impl.jacobi_eigh_real
jacobi_eigh_cplx = _impl.jacobi_eigh_cplx
j_peaked = _impl.j_peaked
j_rc = _impl.j_rc
coth_half = _impl.coth_half


def backend_name() -> str:
    """Name of the active kernel backend ("compiled" or "pure")."""
    return BACKEND
