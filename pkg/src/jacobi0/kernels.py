"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``JACOBI0_PURE_PYTHON=1`` to force the fallback.
"""
import os

from jacobi0 import _pykernels

if os.environ.get("JACOBI0_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from jacobi0 import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

cexpm1 = _impl.cexpm1
log_theta = _impl.log_theta
theta_logderiv = _impl.theta_logderiv
lambert = _impl.lambert
conv2d = _impl.conv2d

__all__ = ["BACKEND", "cexpm1", "log_theta", "theta_logderiv", "lambert", "conv2d"]
