"""Activation functions and the high-pass / low-pass split of ReLU.

For a cutoff ``gamma > 0`` ReLU is written as ``highpass + lowpass`` where
the high-pass part keeps only the Fourier frequencies ``|theta| > gamma``:

    highpass(y) = |y|/2 - cos(gamma y)/(pi gamma) - y Si(gamma y)/pi.

The low-pass remainder stays within ``3 gamma y^2 / (2 pi)`` of the affine
function ``y/2 + 1/(pi gamma)``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from . import _kernels
from ._errors import InputError

TAGS = ("relu", "softplus", "highpass", "lowpass")
ACTIVATION_CODES = {
    "relu": _kernels.RELU,
    "softplus": _kernels.SOFTPLUS,
    "highpass": _kernels.HIGHPASS,
    "lowpass": _kernels.LOWPASS,
}
REMAINDER_CONSTANT = 3.0 / (2.0 * math.pi)


def _scalar_or_array(y, out):
    return float(out) if np.ndim(y) == 0 else out


def check_gamma(gamma):
    try:
        gamma = float(gamma)
    except (TypeError, ValueError):
        raise InputError(f"gamma must be a positive number, got {gamma!r}") from None
    if not (math.isfinite(gamma) and gamma > 0):
        raise InputError(f"gamma must be finite and positive, got {gamma!r}")
    return gamma


def relu(y):
    return _scalar_or_array(y, np.maximum(np.asarray(y, dtype=np.float64), 0.0))


def softplus(y):
    """``log(1 + e^y)`` without overflow for large ``|y|``."""
    y_ = np.asarray(y, dtype=np.float64)
    return _scalar_or_array(y, np.maximum(y_, 0.0) + np.log1p(np.exp(-np.abs(y_))))


def logistic(y):
    y_ = np.asarray(y, dtype=np.float64)
    return _scalar_or_array(y, 0.5 * (1.0 + np.tanh(0.5 * y_)))


def sine_integral(y):
    """``Si(y) = int_0^y sin(s)/s ds``, accurate to about 1e-15 absolute."""
    return _scalar_or_array(y, _kernels.sine_integral(y))


def highpass_relu(y, gamma):
    gamma = check_gamma(gamma)
    y_ = np.asarray(y, dtype=np.float64)
    out = (
        0.5 * np.abs(y_)
        - np.cos(gamma * y_) / (math.pi * gamma)
        - y_ * _kernels.sine_integral(gamma * y_) / math.pi
    )
    return _scalar_or_array(y, out)


def lowpass_relu(y, gamma):
    y_ = np.asarray(y, dtype=np.float64)
    return _scalar_or_array(y, np.maximum(y_, 0.0) - highpass_relu(y_, gamma))


def lowpass_polynomial(y, gamma):
    """The affine part ``y/2 + 1/(pi gamma)`` the low-pass ReLU stays close to."""
    gamma = check_gamma(gamma)
    y_ = np.asarray(y, dtype=np.float64)
    return _scalar_or_array(y, 0.5 * y_ + 1.0 / (math.pi * gamma))


def remainder_bound(y, gamma):
    gamma = check_gamma(gamma)
    y_ = np.asarray(y, dtype=np.float64)
    return _scalar_or_array(y, REMAINDER_CONSTANT * gamma * y_ * y_)


def activation(y, tag, gamma=None):
    """Apply the activation named ``tag``; ``gamma`` is required for the split parts."""
    if tag == "relu":
        return relu(y)
    if tag == "softplus":
        return softplus(y)
    if tag == "highpass":
        return highpass_relu(y, gamma)
    if tag == "lowpass":
        return lowpass_relu(y, gamma)
    raise InputError(f"unknown activation {tag!r}; expected one of {TAGS}")


def activation_code(tag, gamma=None):
    """Kernel code and cutoff for ``tag``; validates ``gamma`` when it matters."""
    if tag not in ACTIVATION_CODES:
        raise InputError(f"unknown activation {tag!r}; expected one of {TAGS}")
    if tag in ("highpass", "lowpass"):
        return ACTIVATION_CODES[tag], check_gamma(gamma)
    return ACTIVATION_CODES[tag], 1.0


def highpass_relu_by_quadrature(y, gamma, epsabs=1e-12):
    """Independent evaluation of the high-pass ReLU from its Fourier integral.

    With the ReLU transform ``-1/(sqrt(2 pi) theta^2)`` the frequencies
    ``|theta| > gamma`` reconstruct ``-(1/pi) int_gamma^inf cos(theta y)/theta^2``.
    The oscillatory tail is integrated by QUADPACK's Fourier-weight routine.
    """
    gamma = check_gamma(gamma)
    y = abs(float(y))
    if y == 0.0:
        return -1.0 / (math.pi * gamma)
    val, _ = integrate.quad(
        lambda t: 1.0 / (t * t), gamma, np.inf, weight="cos", wvar=y, epsabs=epsabs, limlst=200
    )
    return -val / math.pi


@dataclass(frozen=True)
class InversionReport:
    gamma: float
    y: np.ndarray
    remainder: np.ndarray
    bound: np.ndarray

    @property
    def violation(self):
        return self.remainder - self.bound

    @property
    def max_violation(self):
        return float(np.max(self.violation))


def fourier_inversion_check(gamma, y_grid):
    """Compare ``|relu - highpass - p_gamma|`` with ``3 gamma y^2 / (2 pi)`` on a grid.

    ``max_violation <= 0`` certifies the remainder bound on the grid.
    """
    gamma = check_gamma(gamma)
    y = np.asarray(y_grid, dtype=np.float64)
    if y.ndim != 1 or y.size == 0 or not np.all(np.isfinite(y)):
        raise InputError("y_grid must be a non-empty finite 1-d grid")
    remainder = np.abs(lowpass_relu(y, gamma) - lowpass_polynomial(y, gamma))
    return InversionReport(gamma, y, remainder, remainder_bound(y, gamma))


@dataclass(frozen=True)
class RidgeSpec:
    """Ridge ``sigma(w . x + b)`` with ``w`` flattened particle-major to length ``n*d``."""

    w: np.ndarray
    b: float
    activation: str = "relu"
    gamma: float | None = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if not (np.all(np.isfinite(w)) and math.isfinite(self.b)):
            raise InputError("ridge parameters must be finite")
        activation_code(self.activation, self.gamma)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))


def flatten_configurations(x, size):
    """Return ``(xs, single)`` with ``xs`` of shape ``(S, size)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == size and x.ndim <= 2:
        return x.reshape(1, size), True
    if x.ndim < 2 or math.prod(x.shape[1:]) != size:
        raise InputError(f"configuration of shape {x.shape} does not have {size} coordinates")
    return x.reshape(x.shape[0], size), False


def ridge_eval(spec, x):
    """Evaluate the ridge at one configuration or a batch of them."""
    xs, single = flatten_configurations(x, spec.w.size)
    out = activation(xs @ spec.w + spec.b, spec.activation, spec.gamma)
    return float(out[0]) if single else out
