"""Kernel backend selection.

The O(n^2) weight-matrix build and the per-node Mittag-Leffler series are
the hot loops. A compiled extension provides them when it was built; the
numpy implementations are the fallback and the reference. Selection
happens once at import; FRACFDE_BACKEND=python forces the fallback (used
by the benchmark and the cross-backend tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("FRACFDE_BACKEND", "").strip().lower()

_impl = None
if _forced in ("", "c"):
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
        if _forced == "c":
            raise ImportError(
                "FRACFDE_BACKEND=c requested but the compiled kernels are "
                "not available; reinstall with a C compiler and Cython"
            )
if _impl is None:
    _impl = _kernels_py

pi_weight_matrix = _impl.pi_weight_matrix
pi_weight_row = _impl.pi_weight_row
ml_series_vec = _impl.ml_series_vec


def backend_name() -> str:
    """Identifier of the active kernel implementation."""
    return _impl.BACKEND_NAME


def available_backends() -> dict:
    """Importable kernel modules keyed by name (for benchmarks/tests)."""
    mods = {"python": _kernels_py}
    try:
        from . import _kernels_c

        mods["c"] = _kernels_c
    except ImportError:
        pass
    return mods
