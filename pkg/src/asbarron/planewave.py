"""Anti-symmetrised plane waves under the standard Gaussian envelope.

A wave matrix ``w`` of shape ``(n, d)`` indexes the Slater determinant
``a_w = e_{w_1} ^ ... ^ e_{w_n}`` with ``e_v(x) = exp(i v . x)``. All inner
products are taken in ``L^2`` with respect to ``N(0, I)`` per coordinate, so
single-particle overlaps are Gaussian characteristic functions and
Slater overlaps are determinants of those.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from ._errors import InputError, NumericalError
from ._mpdet import gram_exp_logdet
from .permutations import permutation_table

_EPS = np.finfo(np.float64).eps
# relative error budget for the float64 Gram determinant before refinement
_REFINE_RTOL = 1e-10
_IMAG_RTOL = 1e-10
_IMAG_ATOL = 1e-12


def as_wave_matrix(w, name="w"):
    """Validate and return ``w`` as a finite float64 array of shape ``(n, d)``."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
        raise InputError(f"{name} must have shape (n, d) with n, d >= 1, got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InputError(f"{name} has non-finite entries")
    return w


def _as_configurations(x, n, d):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 2 or (x.ndim == 1 and d == 1)
    if x.ndim == 1 and d == 1:
        x = x[:, None]
    if single:
        x = x[None]
    if x.ndim != 3 or x.shape[1:] != (n, d):
        raise InputError(f"configuration shape {x.shape[1:]} does not match (n, d) = {(n, d)}")
    if not np.all(np.isfinite(x)):
        raise InputError("configuration has non-finite entries")
    return x, single


def evaluate_planewave_slater(w, x):
    """Evaluate ``a_w`` at one configuration ``(n, d)`` or a batch ``(S, n, d)``."""
    w = as_wave_matrix(w)
    xs, single = _as_configurations(x, *w.shape)
    vals = _kernels.planewave_sum_values(xs, w[None], np.ones(1, dtype=np.complex128))
    return complex(vals[0]) if single else vals


def single_particle_overlap(v, w):
    """``<e_v, e_w> = exp(-|w - v|^2 / 2)`` under the Gaussian envelope."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    if v.shape != w.shape or v.ndim != 1:
        raise InputError(f"dimension mismatch: {v.shape} vs {w.shape}")
    diff = w - v
    return float(np.exp(-0.5 * diff @ diff))


def overlap_matrix(v, w):
    """Matrix ``B_ij = <e_{v_i}, e_{w_j}>`` for wave matrices of equal shape."""
    v = as_wave_matrix(v, "v")
    w = as_wave_matrix(w, "w")
    if v.shape != w.shape:
        raise InputError(f"shape mismatch: {v.shape} vs {w.shape}")
    diff = v[:, None, :] - w[None, :, :]
    return np.exp(-0.5 * np.einsum("ijk,ijk->ij", diff, diff))


def slater_overlap(v, w):
    """``<a_v, a_w>`` as the determinant of the single-particle overlap matrix."""
    return float(np.linalg.det(overlap_matrix(v, w)))


def _has_repeated_rows(w):
    n = w.shape[0]
    same = np.all(w[:, None, :] == w[None, :, :], axis=-1)
    return bool(np.any(same[np.triu_indices(n, 1)]))


def slater_log_norm_sq(w):
    """Natural log of ``||a_w||^2``; ``-inf`` when ``a_w`` vanishes identically."""
    w = as_wave_matrix(w)
    n = w.shape[0]
    if n == 1:
        return 0.0
    if _has_repeated_rows(w):
        return -math.inf
    gram = w @ w.T
    sq = np.diag(gram)
    # symmetric diagonal rescaling of exp(gram) absorbs the exp(-|w|^2) prefactor exactly
    scaled = np.exp(gram - 0.5 * sq[:, None] - 0.5 * sq[None, :])
    # the scaled Gram is symmetric positive definite: its spectrum gives the
    # log-determinant and the condition number in one factorisation
    eig = np.linalg.eigvalsh(scaled)
    if eig[0] > 0 and n * _EPS * eig[-1] <= _REFINE_RTOL * eig[0]:
        return float(np.sum(np.log(eig)))
    sign, logdet = gram_exp_logdet(w)
    if sign <= 0:
        return -math.inf
    return logdet - float(np.sum(w * w))


def slater_norm_sq(w):
    """``||a_w||^2 = exp(-|w|_F^2) det(exp(w_i . w_j))``, a value in ``[0, 1]``.

    Evaluated in float64 when the Gram determinant is well conditioned and
    in adaptive high precision otherwise, so tiny norms keep their
    relative accuracy instead of drowning in round-off.
    """
    return math.exp(slater_log_norm_sq(w))


def real_part_checked(z, what="inner product"):
    """Drop the imaginary part of a provably real quantity after checking it."""
    z = complex(z)
    if abs(z.imag) > _IMAG_RTOL * abs(z.real) + _IMAG_ATOL:
        raise NumericalError(f"{what} has imaginary part {z.imag!r} (real part {z.real!r})")
    return z.real


@dataclass(frozen=True)
class SlaterSum:
    """Finite combination ``sum_k c_k a_{w_k}`` of plane-wave Slater determinants.

    ``coefficients`` has shape ``(m,)`` (complex); ``waves`` has shape
    ``(m, n, d)``. Any ``1/m`` prefactor lives inside the coefficients.
    """

    coefficients: np.ndarray
    waves: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=np.complex128))
        w = np.asarray(self.waves, dtype=np.float64)
        if w.ndim == 2:
            w = w[None]
        if w.ndim != 3 or w.shape[0] == 0:
            raise InputError("a SlaterSum needs a non-empty (m, n, d) array of waves")
        if c.shape != (w.shape[0],):
            raise InputError(f"{c.shape[0]} coefficients for {w.shape[0]} terms")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(w))):
            raise InputError("non-finite SlaterSum entries")
        c.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "waves", w)

    @property
    def n(self):
        return self.waves.shape[1]

    @property
    def d(self):
        return self.waves.shape[2]

    def __len__(self):
        return self.waves.shape[0]

    def __call__(self, x):
        xs, single = _as_configurations(x, self.n, self.d)
        vals = _kernels.planewave_sum_values(xs, self.waves, self.coefficients)
        return complex(vals[0]) if single else vals

    def scaled(self, factor):
        return SlaterSum(self.coefficients * factor, self.waves)

    def concat(self, other):
        if (self.n, self.d) != (other.n, other.d):
            raise InputError("cannot concatenate sums with different (n, d)")
        return SlaterSum(
            np.concatenate([self.coefficients, other.coefficients]),
            np.concatenate([self.waves, other.waves]),
        )


def overlap_tensor(waves_a, waves_b):
    """Single-particle overlaps ``O[j, k, a, b] = <e_{A_j,a}, e_{B_k,b}>``."""
    diff = waves_a[:, None, :, None, :] - waves_b[None, :, None, :, :]
    return np.exp(-0.5 * np.einsum("jkabq,jkabq->jkab", diff, diff))


def gram_matrix(waves_a, waves_b, block=256):
    """Real matrix of Slater overlaps ``<a_{A_j}, a_{B_k}>``, built in row blocks."""
    out = np.empty((waves_a.shape[0], waves_b.shape[0]))
    for lo in range(0, waves_a.shape[0], block):
        hi = min(lo + block, waves_a.shape[0])
        out[lo:hi] = np.linalg.det(overlap_tensor(waves_a[lo:hi], waves_b))
    return out


def slater_sum_inner(A, B):
    """Sesquilinear ``<A, B> = sum_jk conj(c_j) c'_k <a_{w_j}, a_{w'_k}>``."""
    if (A.n, A.d) != (B.n, B.d):
        raise InputError(f"shape mismatch: {(A.n, A.d)} vs {(B.n, B.d)}")
    gram = gram_matrix(A.waves, B.waves)
    return complex(np.conj(A.coefficients) @ gram @ B.coefficients)


def slater_sum_norm_sq(A):
    """``||A||^2``; checks that the Hermitian form came out real."""
    return real_part_checked(slater_sum_inner(A, A), "squared norm")


def antisymmetrize_pointwise(f, x):
    """``(1/sqrt(n!)) sum_pi sign(pi) f(x_pi)`` over all ``n!`` permutations.

    ``f`` takes one configuration of shape ``(n, d)``; ``x_pi`` has rows
    ``x[pi[0]], ..., x[pi[n-1]]``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    perms, signs = permutation_table(x.shape[0])
    total = 0
    for perm, sign in zip(perms, signs):
        total = total + sign * f(x[perm])
    return total / math.sqrt(len(perms))


def gaussian_configurations(n, d, n_samples, seed, chunk=4096):
    """Yield blocks of ``x ~ N(0, I_{nd})`` of shape ``(<=chunk, n, d)``.

    Block ``i`` is drawn from its own counter-based Philox stream, so the
    samples depend only on ``(seed, n_samples, chunk)``.
    """
    for i, lo in enumerate(range(0, n_samples, chunk)):
        size = min(chunk, n_samples - lo)
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(i))
        yield rng.standard_normal((size, n, d))


def mc_l2_distance(f, g, n, d, n_samples=65536, seed=0, chunk=4096):
    """Monte Carlo estimate of ``||f - g||`` in ``L^2(N(0, I_{nd}))``.

    ``f`` and ``g`` are vectorised: they map ``(S, n, d)`` to ``(S,)``.
    Returns ``(estimate, std_error)``; the error of the square root is
    propagated to first order from the standard error of the mean.
    """
    if n_samples < 2:
        raise InputError("need at least two samples")
    sq = []
    for xs in gaussian_configurations(n, d, n_samples, seed, chunk):
        diff = np.abs(np.asarray(f(xs)) - np.asarray(g(xs))) ** 2
        bad = ~np.isfinite(diff)
        if bad.any():
            point = xs[np.argmax(bad)]
            raise NumericalError("non-finite integrand value", point=point)
        sq.append(diff)
    return l2_from_squares(np.concatenate(sq))


def l2_from_squares(sq):
    """Root-mean-square and its propagated standard error from ``|f - g|^2`` samples."""
    sq = np.asarray(sq, dtype=np.float64)
    mean = float(np.mean(sq))
    se_mean = float(np.std(sq, ddof=1) / math.sqrt(sq.size))
    est = math.sqrt(mean)
    return est, (se_mean / (2.0 * est) if est > 0 else 0.0)
