"""Pick the elimination kernel at import time.

The compiled extension is preferred; ``PROLAB_PURE=1`` forces the
pure-Python twin (used by the parity tests and the benchmark).
"""
from __future__ import annotations

import os

from prolab import _modp_py

BACKEND = "python"
echelon = _modp_py.echelon

if os.environ.get("PROLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from prolab import _modp as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        echelon = _compiled.echelon

python_echelon = _modp_py.echelon


def compiled_echelon():
    """Return the compiled kernel or None when the extension is unavailable."""
    try:
        from prolab import _modp
    except ImportError:
        return None
    return _modp.echelon
