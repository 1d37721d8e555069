"""Discrete Barron measures and their plane-wave decomposition.

A measure is a finite list of atoms ``(a, b, w)`` and represents
``f(x) = sum a * sigma(w . x + b)``. After rescaling atoms to unit
``||w||_inf`` the anti-symmetrised high-pass part of ``f`` is an integral
of plane-wave Slater determinants against a complex measure ``mu`` on
``(theta, atom)``, which is what :func:`maurey_sample` draws from.
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from . import _kernels
from ._errors import DegenerateAtomError, DegenerateMeasureError, InputError
from .activations import activation, activation_code, check_gamma, flatten_configurations
from .permutations import permutation_table
from .planewave import SlaterSum

CANONICAL_TOL = 1e-12
MAX_MEASURE_PARTICLES = 8
_NORM_ORDS = {1: 1, 2: 2, math.inf: np.inf, "inf": np.inf}


def _norm_ord(p):
    try:
        return _NORM_ORDS[p]
    except (KeyError, TypeError):
        raise InputError(f"norm selector must be 1, 2 or inf, got {p!r}") from None


@dataclass(frozen=True)
class BarronAtom:
    a: float
    b: float
    w: tuple


@dataclass(frozen=True)
class BarronMeasure:
    """Atoms stored column-wise: ``a (K,)``, ``b (K,)``, ``w (K, n*d)``.

    ``norm`` records the ``p`` of the last :func:`canonicalize` (``None``
    if the atoms were never rescaled); it is checked on construction.
    """

    n: int
    d: int
    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    norm: float | None = None

    def __post_init__(self):
        n, d = int(self.n), int(self.d)
        if n < 1 or d < 1:
            raise InputError(f"n and d must be positive, got n={n}, d={d}")
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        w = np.asarray(self.w, dtype=np.float64).reshape(a.size, -1) if a.size else np.zeros((0, n * d))
        if b.shape != a.shape or w.shape != (a.size, n * d):
            raise InputError(f"atoms need a, b of equal length and w of length n*d = {n * d}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(w))):
            raise InputError("atom parameters must be finite")
        norm = self.norm
        if norm is not None:
            norm = float(_norm_ord(norm))
            if a.size and np.max(np.abs(np.linalg.norm(w, ord=norm, axis=1) - 1.0)) > CANONICAL_TOL:
                raise InputError(f"atoms are not normalised in the {norm}-norm")
        for arr in (a, b, w):
            arr.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "norm", norm)

    @classmethod
    def from_atoms(cls, n, d, atoms):
        atoms = list(atoms)
        a = [float(t[0]) for t in atoms]
        b = [float(t[1]) for t in atoms]
        w = [np.asarray(t[2], dtype=np.float64).reshape(-1) for t in atoms]
        if any(v.size != n * d for v in w):
            raise InputError(f"every inner weight must have n*d = {n * d} entries")
        return cls(n, d, a, b, np.array(w).reshape(len(atoms), n * d))

    @property
    def canonical(self):
        """True when every atom has ``||w||_inf = 1``."""
        return self.norm == math.inf

    def __len__(self):
        return self.a.size

    @property
    def atoms(self):
        return [BarronAtom(float(a), float(b), tuple(w)) for a, b, w in zip(self.a, self.b, self.w)]

    def waves(self):
        """Inner weights reshaped to ``(K, n, d)``."""
        return self.w.reshape(-1, self.n, self.d)


def phi(rho):
    """Translation-invariant norm ``sum |a| ||w||_1``."""
    return float(np.sum(np.abs(rho.a) * np.abs(rho.w).sum(axis=1)))


def phi_tilde(rho):
    """``sum |a| (||w||_1 + |b|)``."""
    return float(np.sum(np.abs(rho.a) * (np.abs(rho.w).sum(axis=1) + np.abs(rho.b))))


def evaluate_f_rho(rho, x, tag="relu", gamma=None):
    """``sum a sigma(w . x + b)`` at one configuration or a batch."""
    xs, single = flatten_configurations(x, rho.n * rho.d)
    if len(rho) == 0:
        out = np.zeros(xs.shape[0])
    else:
        out = activation(xs @ rho.w.T + rho.b, tag, gamma) @ rho.a
    return float(out[0]) if single else out


def canonicalize(rho, p=math.inf):
    """Rescale each atom to ``(|w|_p a, b/|w|_p, w/|w|_p)``.

    ReLU is positively homogeneous, so the represented function and
    ``phi`` are unchanged. Atoms with ``w = 0`` raise
    :class:`DegenerateAtomError` listing their indices.
    """
    ord_ = _norm_ord(p)
    scale = np.linalg.norm(rho.w, ord=ord_, axis=1) if len(rho) else np.zeros(0)
    bad = np.flatnonzero(scale == 0)
    if bad.size:
        raise DegenerateAtomError(bad.tolist())
    w = rho.w / scale[:, None]
    return BarronMeasure(rho.n, rho.d, rho.a * scale, rho.b / scale, w, norm=float(ord_))


def antisymmetrize_measure(rho):
    """Measure ``rho'`` with ``AS f_rho = sqrt(n!) f_rho'``.

    Every atom is replaced by the ``n!`` atoms
    ``(sign(pi) a / n!, b, w permuted by pi)``, so ``phi`` is preserved.
    """
    n, d = rho.n, rho.d
    perms, signs = permutation_table(n, limit=MAX_MEASURE_PARTICLES)
    # f(x_pi) pairs particle pi[j] with block j, i.e. block inv(pi)[i] with particle i
    inv = np.argsort(perms, axis=1)
    P = len(perms)
    blocks = rho.waves()
    w = blocks[:, inv, :].reshape(len(rho) * P, n * d)
    a = (rho.a[:, None] * signs[None, :] / P).reshape(-1)
    b = np.repeat(rho.b, P)
    return BarronMeasure(n, d, a, b, w)


def antisym_ridge_sum(W, b, a, x, n, d, tag="relu", gamma=None):
    """``AS`` of ``sum_k a_k sigma(W_k . x + b_k)`` evaluated at configurations ``x``.

    ``W`` has shape ``(K, n*d)``; ``x`` is one configuration or a batch.
    """
    code, g = activation_code(tag, gamma)
    perms, signs = permutation_table(n)
    xs, single = flatten_configurations(x, n * d)
    W = np.asarray(W, dtype=np.float64).reshape(-1, n, d)
    out = _kernels.antisym_ridge_values(xs.reshape(-1, n, d), W, b, a, perms, signs, code, g)
    return float(out[0]) if single else out


def antisym_f_rho(rho, x, tag="relu", gamma=None):
    """Pointwise ``AS f_rho`` through the permutation sum."""
    if len(rho) == 0:
        xs, single = flatten_configurations(x, rho.n * rho.d)
        return 0.0 if single else np.zeros(xs.shape[0])
    return antisym_ridge_sum(rho.w, rho.b, rho.a, x, rho.n, rho.d, tag, gamma)


@dataclass(frozen=True)
class TruncatedAntiRidge:
    """``A_{w,b;gamma}``: the anti-symmetrised high-pass ReLU ridge."""

    w: np.ndarray
    b: float
    gamma: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim == 1:
            w = w[:, None]
        if w.ndim != 2 or not np.all(np.isfinite(w)) or not math.isfinite(self.b):
            raise InputError("w must be a finite (n, d) array and b finite")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "gamma", check_gamma(self.gamma))


def truncated_antiridge_eval(t, x):
    n, d = t.w.shape
    return antisym_ridge_sum(t.w.reshape(1, -1), [t.b], [1.0], x, n, d, "highpass", t.gamma)


def psi_gamma_eval(rho, gamma, x):
    """``sum a A_{w,b;gamma}(x)`` for a normalised measure."""
    if rho.norm is None:
        raise InputError("psi_gamma needs a canonicalised measure")
    if len(rho) == 0:
        xs, single = flatten_configurations(x, rho.n * rho.d)
        return 0.0 if single else np.zeros(xs.shape[0])
    return antisym_ridge_sum(rho.w, rho.b, rho.a, x, rho.n, rho.d, "highpass", gamma)


@dataclass(frozen=True)
class ComplexMeasureSpec:
    """Complex measure on ``(theta, atom)`` with density
    ``-sign(a) e^{i b theta} / (2 pi theta^2)`` against ``|a| d rho`` on ``|theta| >= gamma``.
    """

    base: BarronMeasure
    gamma: float

    def __post_init__(self):
        if self.base.norm is None:
            raise InputError("the base measure must be canonicalised")
        object.__setattr__(self, "gamma", check_gamma(self.gamma))


def default_gamma(d):
    return 1.0 / (2.0 * math.sqrt(d))


def total_variation(mu):
    """``||mu|| = sum |a| / (pi gamma)``.

    For ``l1``-normalised atoms this is ``phi(base) / (pi gamma)``; for
    ``l_inf``-normalised atoms it is bounded by that value.
    """
    return float(np.sum(np.abs(mu.base.a))) / (math.pi * mu.gamma)


def maurey_sample(mu, m, seed):
    """Draw ``m`` i.i.d. terms from ``|mu| / ||mu||`` as a :class:`SlaterSum`.

    The expectation of the returned sum at any ``x`` is ``psi_gamma(x)``.
    """
    m = int(m)
    if m < 1:
        raise InputError("m must be at least 1")
    base = mu.base
    weights = np.abs(base.a)
    total = float(weights.sum())
    if len(base) == 0 or total == 0:
        raise DegenerateMeasureError("the measure has zero total variation")
    rng = np.random.Generator(np.random.Philox(key=seed))
    idx = rng.choice(len(base), size=m, p=weights / total)
    u = 1.0 - rng.random(m)  # (0, 1]
    side = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    theta = side * mu.gamma / u
    tv = total / (math.pi * mu.gamma)
    phase = -np.sign(base.a[idx]) * np.exp(1j * base.b[idx] * theta)
    waves = theta[:, None, None] * base.waves()[idx]
    return SlaterSum(tv / m * phase, waves)


def _reject_constant(name):
    raise InputError(f"non-finite number {name} in measure file")


def measure_from_dict(doc, allow_empty=True):
    if not isinstance(doc, dict) or set(doc) != {"n", "d", "atoms"}:
        raise InputError('measure documents need exactly the keys "n", "d", "atoms"')
    n, d, atoms = doc["n"], doc["d"], doc["atoms"]
    if not (isinstance(n, int) and isinstance(d, int)) or isinstance(n, bool) or isinstance(d, bool):
        raise InputError('"n" and "d" must be integers')
    if not isinstance(atoms, list) or (not atoms and not allow_empty):
        raise InputError('"atoms" must be a non-empty list')
    parsed = []
    for i, atom in enumerate(atoms):
        if not isinstance(atom, dict) or set(atom) != {"a", "b", "w"}:
            raise InputError(f'atom {i} needs exactly the keys "a", "b", "w"')
        w = atom["w"]
        if not isinstance(w, list) or len(w) != n * d:
            raise InputError(f"atom {i}: w must be a list of n*d = {n * d} numbers")
        try:
            parsed.append((float(atom["a"]), float(atom["b"]), [float(v) for v in w]))
        except (TypeError, ValueError):
            raise InputError(f"atom {i}: non-numeric entry") from None
    return BarronMeasure.from_atoms(n, d, parsed)


def measure_to_dict(rho):
    return {
        "n": rho.n,
        "d": rho.d,
        "atoms": [
            {"a": float(a), "b": float(b), "w": [float(v) for v in w]}
            for a, b, w in zip(rho.a, rho.b, rho.w)
        ],
    }


def loads_measure(text, allow_empty=True):
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed measure file: {exc}") from None
    return measure_from_dict(doc, allow_empty)


def dumps_measure(rho):
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(measure_to_dict(rho), indent=2) + "\n"


def load_measure(path, allow_empty=True):
    with open(path, encoding="utf-8") as fh:
        return loads_measure(fh.read(), allow_empty)


def dump_measure(rho, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_measure(rho))

