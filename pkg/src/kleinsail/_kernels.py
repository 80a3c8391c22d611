"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``KLEINSAIL_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("KLEINSAIL_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import pareto_filter, slab_candidates, visible
else:
    try:
        from ._ckernels import pareto_filter, slab_candidates, visible

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from ._kernels_py import pareto_filter, slab_candidates, visible

__all__ = ["BACKEND", "pareto_filter", "slab_candidates", "visible"]
