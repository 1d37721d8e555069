"""Least-squares fitting of plane-wave Slater sums to a target.

The objective ``||psi_m - psi||^2 = c^H B c - 2 Re(c^H r) + ||psi||^2`` is
quadratic in the coefficients ``c``, so they are eliminated exactly
(``B c = r``) and only the wavevectors are optimised, with analytic
gradients of the overlap determinants.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize

from .._errors import InputError, TrainingError
from ..planewave import SlaterSum, gram_matrix, overlap_tensor, slater_sum_norm_sq
from .hermite import HermiteTarget

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class TrainConfig:
    """Optimiser settings shared by the Slater fit and the network estimator."""

    epsilon: float = 0.01
    lam: float = 1e-3
    steps: int = 3000
    batch: int = 256
    lr: float = 0.02
    momentum: float = 0.9
    seed: int = 0
    restarts: int = 2
    width: int = 16
    fit_steps: int = 400
    init_scale: float = 1.0
    net_init_scale: float = 3.0
    warmup_samples: int = 4096
    net_init: str = "zero"
    clip: float = 10.0
    eval_samples: int = 1 << 15
    window_steps: int = 100
    converge_tol: float = 1e-3

    def __post_init__(self):
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise InputError("epsilon must be finite and >= 0")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise InputError("lam must be finite and > 0")
        for name in ("steps", "batch", "restarts", "width", "fit_steps", "eval_samples", "window_steps", "warmup_samples"):
            if int(getattr(self, name)) < 1:
                raise InputError(f"{name} must be a positive integer")
        for name in ("lr", "init_scale", "net_init_scale", "clip"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.net_init not in ("zero", "lstsq"):
            raise InputError('net_init must be "zero" or "lstsq"')
        if not 0 <= self.momentum < 1:
            raise InputError("momentum must lie in [0, 1)")


def adjugate(A):
    """Batched adjugate ``adj(A)`` (so that ``adj(A) A = det(A) I``), stable for singular ``A``."""
    U, s, Vh = np.linalg.svd(A)
    n = s.shape[-1]
    prods = np.empty_like(s)
    for i in range(n):
        prods[..., i] = np.prod(np.delete(s, i, axis=-1), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.linalg.det(U) * np.linalg.det(Vh)
    # A = U S Vh  =>  adj(A) = det(U) det(Vh) Vh^H adj(S) U^H
    adj = np.conj(np.swapaxes(Vh, -1, -2)) * prods[..., None, :] @ np.conj(np.swapaxes(U, -1, -2))
    return scale[..., None, None] * adj


def _slater_gram_with_grad(waves_a, waves_b):
    """``G[j, k] = <a_{A_j}, a_{B_k}>`` and ``dG[j, k, i, q] = dG[j, k] / dA_{j,i,q}``."""
    O = overlap_tensor(waves_a, waves_b)  # (ma, mb, n, n), rows follow A
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.linalg.det(O)
    adj = adjugate(O)
    diff = waves_a[:, None, :, None, :] - waves_b[None, :, None, :, :]  # (ma, mb, n, n, d)
    # d det = sum_ij adj[j, i] dO[i, j];  dO[i, j]/dA_{i,q} = -(A_i - B_j)_q O[i, j]
    weight = np.swapaxes(adj, -1, -2) * O
    dG = -np.einsum("jkab,jkabq->jkaq", weight, diff)
    return G, dG


class _SlaterSumTarget:
    def __init__(self, target):
        self.target = target
        self.n, self.d = target.n, target.d
        self.norm_sq = slater_sum_norm_sq(target)
        # overlaps with the target are sums of determinants of entries <= 1
        self.magnitude = float(np.sum(np.abs(target.coefficients)))

    def overlaps(self, waves):
        G, dG = _slater_gram_with_grad(waves, self.target.waves)
        c = self.target.coefficients
        return G @ c, np.einsum("jkaq,k->jaq", dG, c)


class _HermiteFitTarget:
    def __init__(self, target):
        self.target = target
        self.n, self.d = target.n, target.d
        self.norm_sq = target.scale**2 * target.raw_norm**2
        self.magnitude = target.scale

    def overlaps(self, waves):
        O, dO = self.target.orbital_overlaps(waves, with_grad=True)
        adj = adjugate(O)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.linalg.det(O) * self.target.scale
        dr = np.einsum("mba,mabq->maq", adj, dO) * self.target.scale
        return r, dr


def _fit_target(target):
    if isinstance(target, HermiteTarget):
        return _HermiteFitTarget(target)
    if isinstance(target, SlaterSum):
        return _SlaterSumTarget(target)
    raise InputError(f"cannot fit a target of type {type(target).__name__}")


@dataclass
class FitResult:
    approximant: SlaterSum
    error: float  # sqrt of the objective, floored at its round-off level
    objective: float
    noise_floor: float
    trace: list = field(default_factory=list)


def _determinant_scale(n):
    # Hadamard: an n x n determinant of entries <= 1 is at most n^(n/2)
    return n ** (n / 2)


def _objective(waves, tgt):
    n = waves.shape[1]
    H = _determinant_scale(n)
    B, dB = _slater_gram_with_grad(waves, waves)
    r, dr = tgt.overlaps(waves)
    # a ridge at the round-off level of B keeps c bounded when waves nearly coincide
    ridge = 16 * n * _EPS * H
    c = np.linalg.solve(B + ridge * np.eye(len(B)), r.astype(np.complex128))
    quad = float(np.real(np.conj(c) @ B @ c))
    lin = float(np.real(np.conj(c) @ r))
    J = quad - 2 * lin + tgt.norm_sq
    # gradient at fixed c (the c-derivative vanishes at the optimum)
    C = np.real(np.outer(np.conj(c), c))
    g = 2 * np.einsum("jk,jkaq->jaq", C, dB) - 2 * np.real(np.conj(c)[:, None, None] * dr)
    noise = 8 * n * _EPS * H * (float(np.sum(np.abs(c))) + tgt.magnitude) ** 2
    return J + ridge * float(np.real(np.conj(c) @ c)), J, g, c, noise


def _optimise(waves0, tgt, cfg):
    shape = waves0.shape
    trace = []

    def fun(flat):
        L, J, g, _, _ = _objective(flat.reshape(shape), tgt)
        if not (math.isfinite(L) and np.all(np.isfinite(g))):
            raise TrainingError("non-finite Slater-fit objective", trace)
        trace.append(J)
        return L, g.reshape(-1)

    res = optimize.minimize(
        fun,
        waves0.reshape(-1),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": cfg.fit_steps, "ftol": 1e-15, "gtol": 1e-12},
    )
    start, end = _objective(waves0, tgt), _objective(res.x.reshape(shape), tgt)
    # keep the start if the line search ended somewhere worse
    (L, J, _, c, noise), waves = (end, res.x.reshape(shape)) if end[0] <= start[0] else (start, waves0)
    return FitResult(SlaterSum(c, waves), math.sqrt(max(J, noise)), L, noise, trace)


def _ladder(m):
    sizes = [m]
    while sizes[-1] > 1:
        sizes.append((sizes[-1] + 1) // 2)
    return sizes[::-1]


def fit_slater_sum(target, m, cfg=TrainConfig(), init=None):
    """Fit ``m`` Slater determinants to ``target`` (Hermite target or Slater sum).

    Sizes ``1, 2, 4, ..., m`` are fitted in turn, each warm-started from
    the previous solution plus fresh random terms, so the error is
    non-increasing in ``m`` for a fixed configuration. Every rung keeps the
    best of ``cfg.restarts`` runs. ``init`` optionally seeds the first rung
    with a ``(k, n, d)`` array of waves (``k <= m``).
    """
    m = int(m)
    if m < 1:
        raise InputError("m must be at least 1")
    tgt = _fit_target(target)
    n, d = tgt.n, tgt.d
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    best = None
    sizes = _ladder(m)
    if init is not None:
        init = np.asarray(init, dtype=np.float64).reshape(-1, n, d)
        if len(init) > m:
            raise InputError("init has more terms than m")
        sizes = [s for s in sizes if s >= len(init)]
    for size in sizes:
        prev = best.approximant.waves if best is not None else init
        k = 0 if prev is None else len(prev)
        candidates = []
        for _ in range(cfg.restarts):
            fresh = cfg.init_scale * rng.standard_normal((size - k, n, d))
            waves0 = fresh if prev is None else np.concatenate([prev, fresh])
            candidates.append(_optimise(waves0, tgt, cfg))
        if best is not None:
            candidates.append(_pad(best, size, fresh))
        best = min(candidates, key=lambda r: (r.error, r.objective))
    return best


def _pad(result, size, fresh):
    """The previous fit with zero-weight extra terms: same error, ``size`` terms."""
    k = len(result.approximant)
    if k == size:
        return result
    S = result.approximant
    padded = SlaterSum(
        np.concatenate([S.coefficients, np.zeros(size - k)]),
        np.concatenate([S.waves, fresh[: size - k]]),
    )
    return FitResult(padded, result.error, result.objective, result.noise_floor, result.trace)
