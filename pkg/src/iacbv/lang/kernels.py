"""Select the compiled kernels when available, else the pure-Python ones.

Setting IACBV_PURE_PYTHON=1 forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("IACBV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

subset_construction = _impl.subset_construction
refine_partition = _impl.refine_partition
product_witness = _impl.product_witness

__all__ = ["BACKEND", "subset_construction", "refine_partition", "product_witness"]
