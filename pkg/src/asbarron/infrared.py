"""Low-frequency (infrared) truncation error of anti-symmetrised ReLU ridges.

The squared norm of ``a_{t w}`` is ``exp(-t^2 |w|^2) D(t^2)`` with
``D(s) = det(exp(s w_i . w_j)) = sum_k D_k s^k`` and ``D_k >= 0``. The
same coefficients give the exact norm of the discarded low-frequency part

    A_{w,b} - A_{w,b;gamma} = -(1/2pi) int_{|t|<gamma} e^{ibt} t^{-2} a_{tw} dt,

because ``<a_{sw}, a_{tw}> = exp(-(s^2+t^2)|w|^2/2) sum_k D_k (st)^k``.
This stays accurate when the gap is far below what Monte Carlo or
float64 permutation sums can resolve.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from ._errors import InputError
from ._mpdet import gram_exp_series, minimal_total_degree
from .activations import check_gamma
from .measures import antisym_ridge_sum
from .planewave import as_wave_matrix, mc_l2_distance

_GL_NODES = 160


@dataclass(frozen=True)
class NormSeries:
    """Taylor data of ``t -> ||a_{tw}||^2``."""

    coeffs: np.ndarray  # D_k
    w_sq: float  # squared Frobenius norm of w
    k0: int  # first index that can be non-zero

    def norm_sq(self, t):
        t = np.asarray(t, dtype=np.float64)
        s = t * t
        poly = np.polynomial.polynomial.polyval(s, self.coeffs)
        return np.exp(-s * self.w_sq) * poly


def norm_series(w, n_coeffs=None):
    w = as_wave_matrix(w)
    n, d = w.shape
    return NormSeries(gram_exp_series(w, n_coeffs), float(np.sum(w * w)), minimal_total_degree(n, d))


def _require_decay(series, n):
    if series.k0 < 2:
        raise InputError(
            f"n={n} particles: the affine part of the low-pass ReLU survives anti-symmetrisation; need n >= 3"
        )


def truncation_gap(w, b, gamma, series=None):
    """Exact ``||A_{w,b} - A_{w,b;gamma}||`` in ``L^2`` of the Gaussian envelope."""
    w = as_wave_matrix(w)
    gamma = check_gamma(gamma)
    series = series or norm_series(w)
    _require_decay(series, w.shape[0])
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    t = gamma * nodes
    base = weights * gamma * np.exp(1j * b * t - 0.5 * series.w_sq * t * t)
    total = 0.0
    for k in range(series.k0, series.coeffs.size):
        if series.coeffs[k] == 0:
            continue
        I_k = np.sum(base * t ** (k - 2))
        total += series.coeffs[k] * abs(I_k) ** 2
    return math.sqrt(total) / (2.0 * math.pi)


def truncation_gap_bound(w, gamma, series=None):
    """``(1/pi) int_0^gamma ||a_{tw}|| / t^2 dt``, the triangle-inequality bound on the gap."""
    w = as_wave_matrix(w)
    gamma = check_gamma(gamma)
    series = series or norm_series(w)
    _require_decay(series, w.shape[0])

    def integrand(t):
        return math.sqrt(max(float(series.norm_sq(t)), 0.0)) / (t * t)

    val, _ = integrate.quad(integrand, 0.0, gamma, epsabs=0.0, epsrel=1e-10, limit=200)
    return val / math.pi


@dataclass(frozen=True)
class InfraredRow:
    n: int
    gap: float
    bound: float


def infrared_sweep(ns, d=1, b=0.3, gamma=None, seed=0):
    """Exact gap and bound for a random ``w`` with ``||w||_inf = 1`` per ``n``."""
    gamma = check_gamma(gamma if gamma is not None else 1.0 / (2.0 * math.sqrt(d)))
    rows = []
    for n in ns:
        w = random_unit_wave(n, d, seed=seed + n)
        series = norm_series(w)
        rows.append(InfraredRow(n, truncation_gap(w, b, gamma, series), truncation_gap_bound(w, gamma, series)))
    return rows


def random_unit_wave(n, d, seed):
    """Gaussian ``(n, d)`` wave matrix rescaled to ``||w||_inf = 1``."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    w = rng.standard_normal((n, d))
    return w / np.max(np.abs(w))


def truncation_gap_mc(w, b, gamma, n_samples=1 << 16, seed=0):
    """Monte Carlo ``||A_{w,b} - A_{w,b;gamma}||`` from the anti-symmetrised low-pass ridge.

    Only meaningful while the gap is well above the float64 cancellation
    level of the permutation sum (about ``n! * 1e-16``).
    """
    w = as_wave_matrix(w)
    n, d = w.shape
    gamma = check_gamma(gamma)

    def lowpass_part(xs):
        return antisym_ridge_sum(w.reshape(1, -1), [b], [1.0], xs, n, d, "lowpass", gamma)

    return mc_l2_distance(lowpass_part, lambda xs: np.zeros(len(xs)), n, d, n_samples, seed)
