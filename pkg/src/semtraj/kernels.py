"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Setting ``SEMTRAJ_PURE_PYTHON=1`` forces the fallback.
"""

import os

if os.environ.get("SEMTRAJ_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import CompositeIndex, lcs_length

    BACKEND = "python"
else:
    try:
        from ._ckernels import CompositeIndex, lcs_length

        BACKEND = "cython"
    except ImportError:
        from ._pykernels import CompositeIndex, lcs_length

        BACKEND = "python"

__all__ = ["BACKEND", "CompositeIndex", "lcs_length"]
