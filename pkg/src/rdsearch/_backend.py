"""Kernel backend selection.

Prefers the compiled extension, falls back to the NumPy kernels.  Set
``RDSEARCH_BACKEND`` to ``native`` or ``python`` to force a choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _native
except ImportError:  # extension not built
    _native = None

_choice = os.environ.get("RDSEARCH_BACKEND", "auto").strip().lower()
if _choice in ("", "auto"):
    _impl = _native if _native is not None else _kernels_py
elif _choice in ("native", "compiled"):
    if _native is None:
        raise ImportError("RDSEARCH_BACKEND=native but rdsearch._native is not built")
    _impl = _native
elif _choice in ("python", "pure"):
    _impl = _kernels_py
else:
    raise ValueError(f"unrecognized RDSEARCH_BACKEND value: {_choice!r}")

BACKEND = "native" if _impl is not _kernels_py else "python"

best_subset_candidate = _impl.best_subset_candidate
sphere_tau_term = _impl.sphere_tau_term
