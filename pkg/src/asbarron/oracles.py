"""Independent numerical oracles used to cross-check the closed forms.

Nothing here calls the determinant formulas it is meant to verify: overlaps
come from brute-force tensor quadrature of the wavefunctions themselves,
and the high-pass ridges from oscillatory quadrature of their Fourier
integral, one permutation at a time.
"""

import itertools
import math

import numpy as np
from scipy import integrate

from ._errors import CapabilityError, InputError
from .activations import check_gamma, highpass_relu_by_quadrature, logistic, relu
from .permutations import permutation_table
from .planewave import as_wave_matrix

MAX_QUADRATURE_POINTS = 1 << 22


def _single_particle_grid(d, n_nodes):
    # probabilists' nodes integrate against exp(-y^2/2); divide by sqrt(2 pi) per axis
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    weights = weights / math.sqrt(2 * math.pi)
    pts = np.array(list(itertools.product(nodes, repeat=d)))
    wts = np.prod(np.array(list(itertools.product(weights, repeat=d))), axis=1)
    return pts, wts


def _slater_on_grid(w, pts):
    """``a_w`` on the ``n``-fold product of a single-particle grid, as an ``n``-way array."""
    n = w.shape[0]
    orbitals = np.exp(1j * pts @ w.T).T  # (n, P): orbital j at every grid point
    perms, signs = permutation_table(n)
    out = 0
    for perm, sign in zip(perms, signs):
        # particle i carries orbital perm[i]
        term = orbitals[perm[0]]
        for i in range(1, n):
            term = np.multiply.outer(term, orbitals[perm[i]])
        out = out + sign * term
    return out / math.sqrt(math.factorial(n))


def gauss_hermite_overlap(v, w, n_nodes=28):
    """``<a_v, a_w>`` by tensor-product Gauss-Hermite quadrature over all ``n d`` coordinates.

    The default 28 nodes per axis reach round-off for entries up to about 2 in size.
    """
    v = as_wave_matrix(v, "v")
    w = as_wave_matrix(w)
    if v.shape != w.shape:
        raise InputError(f"shape mismatch: {v.shape} vs {w.shape}")
    n, d = w.shape
    if n_nodes ** (n * d) > MAX_QUADRATURE_POINTS:
        raise CapabilityError(f"{n_nodes}^{n * d} quadrature points is too many")
    pts, wts = _single_particle_grid(d, n_nodes)
    weight = wts
    for _ in range(1, n):
        weight = np.multiply.outer(weight, wts)
    return complex(np.sum(weight * np.conj(_slater_on_grid(v, pts)) * _slater_on_grid(w, pts)))


def gauss_hermite_norm_sq(w, n_nodes=28):
    return gauss_hermite_overlap(w, w, n_nodes).real


def gauss_hermite_plane_wave(w, n_nodes=28):
    """``<1, e_w>`` in one dimension, the Gaussian characteristic function."""
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    return complex(np.sum(weights * np.exp(1j * w * nodes)) / math.sqrt(2 * math.pi))


def truncated_antiridge_by_quadrature(w, b, gamma, x):
    """``A_{w,b;gamma}(x)`` from the Fourier integral of every permuted ridge.

    Each permutation contributes ``-(1/pi) int_gamma^inf cos(theta y_pi)/theta^2``
    with ``y_pi = w . (pi x) + b``.
    """
    w = as_wave_matrix(w)
    gamma = check_gamma(gamma)
    x = np.asarray(x, dtype=np.float64).reshape(w.shape)
    n = w.shape[0]
    perms, signs = permutation_table(n)
    total = 0.0
    for perm, sign in zip(perms, signs):
        y = float(np.sum(w * x[perm])) + b
        total += sign * highpass_relu_by_quadrature(y, gamma)
    return total / math.sqrt(math.factorial(n))


def sine_integral_by_quadrature(y):
    val, _ = integrate.quad(np.sinc, 0.0, y / math.pi, epsabs=1e-13, epsrel=1e-13, limit=4000)
    return math.pi * val


def softplus_by_convolution(y):
    """``int relu(y - s) sigma'(s) ds`` with ``sigma`` the logistic function."""

    def integrand(s):
        sig = float(logistic(s))
        return float(relu(y - s)) * sig * (1.0 - sig)

    val, _ = integrate.quad(integrand, -np.inf, y, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def total_variation_by_integration(mu):
    """Integrate ``|a| / (2 pi theta^2)`` over ``|theta| >= gamma`` atom by atom."""
    half, _ = integrate.quad(lambda t: 1.0 / (2 * math.pi * t * t), mu.gamma, np.inf, epsabs=0, epsrel=1e-13)
    return float(np.sum(np.abs(mu.base.a))) * 2.0 * half
