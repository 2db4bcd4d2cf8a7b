"""Import-time selection of the Newton kernel backend.

The compiled extension is used when it was built; setting the environment
variable ``CHOCO_PURE_PYTHON=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

CONVERGED = _kernels_py.CONVERGED
MAX_ITER = _kernels_py.MAX_ITER
SINGULAR = _kernels_py.SINGULAR
STALLED = _kernels_py.STALLED
DIVERGED = _kernels_py.DIVERGED
STATUS_NAMES = {CONVERGED: "converged", MAX_ITER: "max_iter", SINGULAR: "singular",
                STALLED: "stalled", DIVERGED: "diverged"}

_compiled = None
if os.environ.get("CHOCO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "compiled"
    newton_batch = _compiled.newton_batch
    evaluate = _compiled.evaluate
else:
    BACKEND = "python"
    newton_batch = _kernels_py.newton_batch
    evaluate = _kernels_py.evaluate


def available_backends() -> dict:
    """Name -> module for every backend importable in this process."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    else:
        try:
            from . import _kernels
            out["compiled"] = _kernels
        except ImportError:
            pass
    return out
