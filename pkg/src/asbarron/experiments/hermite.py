"""Fermionic harmonic-oscillator targets under the Gaussian envelope.

Normalised probabilists' Hermite polynomials ``h_k = He_k / sqrt(k!)`` are
orthonormal for ``N(0, 1)``, so in envelope-relative form the oscillator
ground state is the Slater determinant of ``n`` polynomial orbitals.
A window multiplies every orbital by a box indicator; the target stays
a Slater determinant and all overlaps factorise per coordinate.
"""

from dataclasses import dataclass
import math

import numpy as np

from .._errors import CapabilityError, InputError
from ..bounds import compositions

MAX_ORDER = 30


def hermite_values(k_max, y):
    """``h_0(y), ..., h_{k_max}(y)`` stacked on a new leading axis."""
    y = np.asarray(y, dtype=np.float64)
    out = np.empty((k_max + 1,) + y.shape)
    out[0] = 1.0
    if k_max >= 1:
        out[1] = y
    for k in range(1, k_max):
        out[k + 1] = (y * out[k] - math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out


def _check_order(k):
    if not 0 <= k <= MAX_ORDER:
        raise CapabilityError(f"orbital order {k} outside [0, {MAX_ORDER}]")


def hermite_orbital_overlap(k, w):
    """``<h_k, e_w> = (i w)^k exp(-w^2/2) / sqrt(k!)``."""
    k = int(k)
    _check_order(k)
    w_ = np.asarray(w, dtype=np.float64)
    out = (1j * w_) ** k * np.exp(-0.5 * w_ * w_) / math.sqrt(math.factorial(k))
    return complex(out) if np.ndim(w) == 0 else out


def _overlap_table(k_max, w):
    """``f_k(w) = <h_k, e_w>`` and ``f_k'(w)`` for ``k <= k_max``.

    Uses ``f_k' = i sqrt(k) f_{k-1} - w f_k``, which stays finite at ``w = 0``.
    """
    w = np.asarray(w, dtype=np.float64)
    f = np.empty((k_max + 1,) + w.shape, dtype=np.complex128)
    f[0] = np.exp(-0.5 * w * w)
    for k in range(1, k_max + 1):
        f[k] = 1j * w * f[k - 1] / math.sqrt(k)
    df = -w * f
    for k in range(1, k_max + 1):
        df[k] += 1j * math.sqrt(k) * f[k - 1]
    return f, df


def _window_overlap_table(k_max, w, lo, hi, n_nodes):
    """``int_lo^hi h_k(x) e^{iwx} phi(x) dx`` and its ``w``-derivative by Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * nodes
    dens = weights * half * np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    h = hermite_values(k_max, x) * dens  # (K, N)
    phase = np.exp(1j * np.multiply.outer(np.asarray(w, dtype=np.float64), x))  # (..., N)
    f = np.moveaxis(phase @ h.T, -1, 0)
    df = np.moveaxis((phase * (1j * x)) @ h.T, -1, 0)
    return f, df


def ground_state_orbitals(n, d):
    """First ``n`` multi-indices by total degree, ties broken colexicographically."""
    out = []
    k = 0
    while len(out) < n:
        out.extend(compositions(k, d))
        k += 1
    return np.array(out[:n], dtype=np.int64).reshape(n, d)


@dataclass(frozen=True)
class HermiteTarget:
    """Slater determinant of Hermite orbitals, optionally restricted to a box.

    ``orbitals`` has shape ``(n, d)``; ``window`` is ``None`` or
    ``(center, halfwidth)`` and masks every particle with
    ``|x_i - center|_inf <= halfwidth``. With ``normalize`` the target is
    rescaled to unit norm and ``raw_norm`` keeps the original norm.
    """

    orbitals: np.ndarray
    window: tuple | None = None
    normalize: bool = True

    def __post_init__(self):
        orb = np.asarray(self.orbitals, dtype=np.int64)
        if orb.ndim == 1:
            orb = orb[:, None]
        if orb.ndim != 2 or orb.shape[0] < 1:
            raise InputError("orbitals must be an (n, d) array of multi-indices")
        if np.any(orb < 0):
            raise InputError("orbital indices must be non-negative")
        if np.max(orb) > MAX_ORDER:
            raise CapabilityError(f"orbital order above {MAX_ORDER}")
        if len(np.unique(orb, axis=0)) != orb.shape[0]:
            raise InputError("occupied orbitals must be distinct")
        orb.flags.writeable = False
        object.__setattr__(self, "orbitals", orb)
        window = self.window
        if window is not None:
            center, halfwidth = window
            center = np.broadcast_to(np.asarray(center, dtype=np.float64), (orb.shape[1],)).copy()
            halfwidth = float(halfwidth)
            if not (halfwidth > 0 and math.isfinite(halfwidth) and np.all(np.isfinite(center))):
                raise InputError("window needs a finite center and a positive halfwidth")
            center.flags.writeable = False
            window = (center, halfwidth)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "raw_norm", math.sqrt(max(self._raw_norm_sq(), 0.0)))
        if self.normalize and self.raw_norm == 0:
            raise InputError("the windowed target vanishes identically")

    @classmethod
    def ground_state(cls, n, d, window=None, normalize=True):
        return cls(ground_state_orbitals(n, d), window, normalize)

    @property
    def n(self):
        return self.orbitals.shape[0]

    @property
    def d(self):
        return self.orbitals.shape[1]

    @property
    def scale(self):
        return 1.0 / self.raw_norm if self.normalize else 1.0

    def describe(self):
        if self.window is None:
            return "", ""
        center, halfwidth = self.window
        return " ".join(repr(float(c)) for c in center), halfwidth

    def _interval(self, axis):
        center, halfwidth = self.window
        return center[axis] - halfwidth, center[axis] + halfwidth

    def _raw_norm_sq(self):
        if self.window is None:
            return 1.0
        # Gram matrix of the windowed orbitals; the norm is its determinant
        n, d = self.orbitals.shape
        k_max = int(self.orbitals.max())
        G = np.ones((n, n))
        for q in range(d):
            lo, hi = self._interval(q)
            nodes, weights = np.polynomial.legendre.leggauss(64 + k_max)
            half = 0.5 * (hi - lo)
            x = 0.5 * (hi + lo) + half * nodes
            dens = weights * half * np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
            h = hermite_values(k_max, x)[self.orbitals[:, q]]
            G *= (h * dens) @ h.T
        return float(np.linalg.det(G))

    def orbital_overlaps(self, waves, with_grad=False):
        """``O[..., i, j] = <e_{w_i}, phi_j>`` for waves of shape ``(..., n, d)``.

        With ``with_grad`` also returns ``dO[..., i, j, q] = d O[..., i, j] / d w_{i,q}``.
        """
        waves = np.asarray(waves, dtype=np.float64)
        if waves.shape[-2:] != self.orbitals.shape:
            raise InputError(f"waves of shape {waves.shape[-2:]} for an ({self.n}, {self.d}) target")
        k_max = int(self.orbitals.max())
        per_axis, per_axis_d = [], []
        for q in range(self.d):
            wq = waves[..., q]
            if self.window is None:
                f, df = _overlap_table(k_max, wq)
            else:
                lo, hi = self._interval(q)
                n_nodes = 64 + k_max + 2 * int(math.ceil(np.max(np.abs(wq), initial=0.0) * (hi - lo)))
                f, df = _window_overlap_table(k_max, wq, lo, hi, n_nodes)
            # f: (K, ..., n) -> (..., n_rows, n_orbitals) conjugated
            idx = self.orbitals[:, q]
            per_axis.append(np.conj(np.moveaxis(f[idx], 0, -1)))
            per_axis_d.append(np.conj(np.moveaxis(df[idx], 0, -1)))
        O = np.prod(per_axis, axis=0)
        if not with_grad:
            return O
        dO = np.empty(O.shape + (self.d,), dtype=np.complex128)
        for q in range(self.d):
            others = [per_axis[r] for r in range(self.d) if r != q]
            rest = np.prod(others, axis=0) if others else 1.0
            dO[..., q] = per_axis_d[q] * rest
        return O, dO


def target_eval(t, x):
    """Target value at one configuration ``(n, d)`` or a batch ``(S, n, d)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 2 or (x.ndim == 1 and t.d == 1)
    xs = x.reshape(-1, t.n, t.d)
    if not np.all(np.isfinite(xs)):
        raise InputError("configuration has non-finite entries")
    k_max = int(t.orbitals.max())
    H = hermite_values(k_max, xs)  # (K, S, n, d)
    M = np.ones((xs.shape[0], t.n, t.n))
    for q in range(t.d):
        M *= np.moveaxis(H[t.orbitals[:, q], :, :, q], 0, -1)  # (S, n_rows, n_orbitals)
    vals = np.linalg.det(M) / math.sqrt(math.factorial(t.n)) * t.scale
    if t.window is not None:
        center, halfwidth = t.window
        inside = np.all(np.abs(xs - center) <= halfwidth, axis=(1, 2))
        vals = np.where(inside, vals, 0.0)
    return float(vals[0]) if single else vals


def slater_vs_hermite_inner(A, t):
    """``<A, psi>`` for a Slater sum and an unwindowed target, by the overlap-determinant rule."""
    if t.window is not None:
        raise InputError("windowed targets have no closed-form overlaps here; use mc_l2_distance")
    if (A.n, A.d) != (t.n, t.d):
        raise InputError(f"shape mismatch: {(A.n, A.d)} vs {(t.n, t.d)}")
    dets = np.linalg.det(t.orbital_overlaps(A.waves))
    return complex(np.conj(A.coefficients) @ dets * t.scale)

