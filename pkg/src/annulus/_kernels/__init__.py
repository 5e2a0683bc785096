"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python
reference implementation is the fallback. Set ``ANNULUS_PURE_KERNELS=1``
to force the fallback (used by the equivalence tests and the benchmark).
"""
import os

if os.environ.get("ANNULUS_PURE_KERNELS"):
    from . import pure as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import pure as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
profile_counts = _impl.profile_counts
simulate_layers = _impl.simulate_layers
