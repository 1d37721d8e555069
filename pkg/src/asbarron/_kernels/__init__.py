"""Backend selection for the hot loops.

The compiled (numba) path is used unless ``ASBARRON_DISABLE_NUMBA`` is set
to a truthy value or numba cannot be imported, in which case the
vectorised numpy path is used. Both expose the same functions.
"""

import os

import numpy as np

from . import _numpy_kernels

RELU, SOFTPLUS, HIGHPASS, LOWPASS = 0, 1, 2, 3


def _numba_requested():
    flag = os.environ.get("ASBARRON_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


_compiled = None
if _numba_requested():
    try:
        from . import _numba_kernels as _compiled
    except ImportError:  # pragma: no cover - depends on environment
        _compiled = None

backend = _compiled if _compiled is not None else _numpy_kernels
BACKEND_NAME = "numba" if _compiled is not None else "numpy"


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return backend
    if name == "numpy":
        return _numpy_kernels
    if name == "numba":
        from . import _numba_kernels

        return _numba_kernels
    raise ValueError(f"unknown backend {name!r}")


def antisym_ridge_values(xs, W, b, a, perms, signs, code, gamma=1.0):
    return backend.antisym_ridge_values(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(W, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(perms, dtype=np.int64),
        np.ascontiguousarray(signs, dtype=np.float64),
        int(code),
        float(gamma),
    )


def softplus_net_jacobian(xs, W, b, a, perms, signs):
    return backend.softplus_net_jacobian(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(W, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(perms, dtype=np.int64),
        np.ascontiguousarray(signs, dtype=np.float64),
    )


def planewave_sum_values(xs, Wt, coef):
    return backend.planewave_sum_values(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(Wt, dtype=np.float64),
        np.ascontiguousarray(coef, dtype=np.complex128),
    )


def sine_integral(y):
    y = np.asarray(y, dtype=np.float64)
    flat = np.ascontiguousarray(y.reshape(-1))
    return backend.sine_integral(flat).reshape(y.shape)
