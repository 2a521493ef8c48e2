"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``AUDIGEST_PURE_PYTHON=1`` to force the fallback (used by the test
suite and the kernel benchmark).
"""

import os

if os.environ.get("AUDIGEST_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

nearest_centroids = _impl.nearest_centroids
sampler_select = _impl.sampler_select


def backend() -> str:
    """'compiled' or 'numpy', whichever is active."""
    return "numpy" if _impl.__name__.endswith("_py") else "compiled"
