"""Pick the hot kernels (partition DP, greedy equipartition) at import time.

The compiled extension is used when it was built; ``SENTMIC_PURE_PYTHON=1``
forces the NumPy fallback. ``use_backend`` switches at runtime (tests and
the benchmark compare both).
"""

import logging
import os

from . import _kernel_py

log = logging.getLogger(__name__)

try:
    from . import _kernel as _kernel_ext
except ImportError:  # extension not built
    _kernel_ext = None

_BACKENDS = {"python": (_kernel_py.dp_best, _kernel_py.greedy_groups)}
if _kernel_ext is not None:
    _BACKENDS["compiled"] = (_kernel_ext.dp_best, _kernel_ext.greedy_groups)


def available_backends():
    return sorted(_BACKENDS)


if os.environ.get("SENTMIC_PURE_PYTHON", "") not in ("", "0") or _kernel_ext is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"
dp_best, greedy_groups = _BACKENDS[BACKEND]
log.debug("MIC kernel backend: %s", BACKEND)


def use_backend(name):
    """Switch the active DP kernel; returns the previous backend name."""
    global BACKEND, dp_best, greedy_groups
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    old = BACKEND
    BACKEND = name
    dp_best, greedy_groups = _BACKENDS[name]
    return old
