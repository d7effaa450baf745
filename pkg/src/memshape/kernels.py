"""Kernel backend selection.

Imports the compiled extension `_kernels` when it is available and falls
back to the pure-numpy `_kernels_py` otherwise.  Set MEMSHAPE_PURE_PYTHON=1
to force the fallback (used by the benchmark and the equivalence tests).
"""

import os

from . import _kernels_py

if os.environ.get("MEMSHAPE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

TYPE_I = _kernels_py.TYPE_I
TYPE_II = _kernels_py.TYPE_II
CONSTANT = _kernels_py.CONSTANT
ARC_LENGTH = _kernels_py.ARC_LENGTH
AREA = _kernels_py.AREA

curvature_batch = _impl.curvature_batch
curvature_partials_batch = _impl.curvature_partials_batch
residual_batch = _impl.residual_batch
state_jacobian_batch = _impl.state_jacobian_batch
param_jacobian_batch = _impl.param_jacobian_batch


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return _impl.BACKEND
