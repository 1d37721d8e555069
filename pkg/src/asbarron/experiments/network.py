"""Anti-symmetrised one-hidden-layer softplus networks and the norm estimator.

``psi(x) = AS[sum_k a_k softplus(w_k . x + b_k)](x)`` with the permutation
sum done inside the compiled kernel, which also returns the Jacobian with
respect to every parameter. Training minimises

    max(||psi - target||^2 - epsilon, 0) + lam * sum_k |a_k| (||w_k||_1 + |b_k|)

by momentum SGD on fresh Gaussian batches; the final penalty value is the
estimate of the epsilon-smooth anti-symmetric Barron norm.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .. import _kernels
from .._errors import InputError, TrainingError
from ..measures import BarronMeasure
from ..permutations import permutation_table
from ..planewave import gaussian_configurations
from .fitting import TrainConfig
from .hermite import HermiteTarget, target_eval

MAX_NETWORK_PARTICLES = 8


@dataclass(frozen=True)
class AntisymNetwork:
    """Parameters ``a (K,)``, ``b (K,)``, ``W (K, n, d)``."""

    a: np.ndarray
    b: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim == 2:
            W = W[:, :, None]
        if W.ndim != 3 or b.shape != a.shape or W.shape[0] != a.size:
            raise InputError("network needs a, b of length K and W of shape (K, n, d)")
        if W.shape[1] > MAX_NETWORK_PARTICLES:
            permutation_table(W.shape[1], limit=MAX_NETWORK_PARTICLES)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(W))):
            raise InputError("network parameters must be finite")
        for arr in (a, b, W):
            arr.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "W", W)

    @property
    def n(self):
        return self.W.shape[1]

    @property
    def d(self):
        return self.W.shape[2]

    @property
    def width(self):
        return self.a.size

    def flat(self):
        return np.concatenate([self.a, self.b, self.W.reshape(-1)])

    @classmethod
    def from_flat(cls, theta, K, n, d):
        return cls(theta[:K], theta[K : 2 * K], theta[2 * K :].reshape(K, n, d))

    def as_measure(self):
        return BarronMeasure(self.n, self.d, self.a, self.b, self.W.reshape(self.width, -1))

    def __call__(self, xs):
        return antisym_network_eval(self, xs)


def _batch(net, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 2 or (x.ndim == 1 and net.d == 1)
    xs = x.reshape(-1, net.n, net.d)
    if not np.all(np.isfinite(xs)):
        raise InputError("configuration has non-finite entries")
    return xs, single


def antisym_network_eval(net, x):
    xs, single = _batch(net, x)
    perms, signs = permutation_table(net.n, limit=MAX_NETWORK_PARTICLES)
    out = _kernels.antisym_ridge_values(xs, net.W, net.b, net.a, perms, signs, _kernels.SOFTPLUS, 1.0)
    return float(out[0]) if single else out


def network_values_and_jacobian(net, xs):
    """Values ``(S,)`` and Jacobian ``(S, K, 2 + n d)`` ordered as ``[a, b, W]`` per unit."""
    xs, _ = _batch(net, xs)
    perms, signs = permutation_table(net.n, limit=MAX_NETWORK_PARTICLES)
    return _kernels.softplus_net_jacobian(xs, net.W, net.b, net.a, perms, signs)


def _flat_grad(jac_weighted, K):
    # (K, 2 + nd) per-unit layout -> flat [a, b, W] layout
    return np.concatenate([jac_weighted[:, 0], jac_weighted[:, 1], jac_weighted[:, 2:].reshape(-1)])


def antisym_network_grad(net, batch, targets):
    """Batch mean squared error and its gradient as an :class:`AntisymNetwork`-shaped triple.

    Returns ``(loss, grad)`` where ``grad`` has the parameter layout of
    :meth:`AntisymNetwork.flat`.
    """
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    values, jac = network_values_and_jacobian(net, batch)
    if values.shape != targets.shape:
        raise InputError(f"{values.size} configurations but {targets.size} targets")
    resid = values - targets
    loss = float(np.mean(resid * resid))
    grad = _flat_grad(np.einsum("s,skp->kp", resid, jac) * (2.0 / resid.size), net.width)
    if not (math.isfinite(loss) and np.all(np.isfinite(grad))):
        raise TrainingError("non-finite network gradient")
    return loss, grad


def phi_tilde_network(net):
    return float(np.sum(np.abs(net.a) * (np.abs(net.W).sum(axis=(1, 2)) + np.abs(net.b))))


def _phi_tilde_subgradient(net):
    inner = np.abs(net.W).sum(axis=(1, 2)) + np.abs(net.b)
    ga = np.sign(net.a) * inner
    gb = np.abs(net.a) * np.sign(net.b)
    gW = np.abs(net.a)[:, None, None] * np.sign(net.W)
    return np.concatenate([ga, gb, gW.reshape(-1)])


def target_values(target, xs):
    if isinstance(target, HermiteTarget):
        return target_eval(target, xs)
    if callable(target):
        return np.real(np.asarray(target(xs)))
    raise InputError(f"unsupported target type {type(target).__name__}")


@dataclass
class NormEstimate:
    estimate: float  # phi_tilde of the trained network
    residual: float  # ||psi - target||^2 on a fresh Monte Carlo sample
    residual_se: float
    converged: bool
    converged_at: int | None
    network: AntisymNetwork
    log: list = field(default_factory=list)  # (step, loss, penalty1, penalty2)


def _initial_network(target, n, d, K, cfg, rng):
    """Inner weights at ``cfg.net_init_scale``; outer weights zero or fitted.

    Anti-symmetrisation annihilates the low-degree Taylor part of each
    ridge, so small inner weights give vanishing features and no gradient
    signal. With ``a = 0`` the first steps grow the outer weights along
    the feature correlations, so the norm only grows as far as the fit
    needs. ``cfg.net_init = "lstsq"`` instead solves for ``a`` by ridge
    regression on a warm-up sample.
    """
    W = cfg.net_init_scale * rng.standard_normal((K, n, d))
    b = rng.standard_normal(K)
    if cfg.net_init == "zero":
        return AntisymNetwork(np.zeros(K), b, W)
    xs = rng.standard_normal((cfg.warmup_samples, n, d))
    _, jac = network_values_and_jacobian(AntisymNetwork(np.ones(K), b, W), xs)
    F = jac[:, :, 0]  # AS softplus features, (S, K)
    y = target_values(target, xs)
    gram = F.T @ F / len(xs)
    reg = 1e-3 * (np.trace(gram) / K + 1e-12)
    a = np.linalg.solve(gram + reg * np.eye(K), F.T @ y / len(xs))
    return AntisymNetwork(a, b, W)


def _train_once(target, n, d, m, cfg, seed):
    rng = np.random.Generator(np.random.Philox(key=seed))
    K = m
    net = _initial_network(target, n, d, K, cfg, rng)
    theta = net.flat()
    velocity = np.zeros_like(theta)
    streak = 0
    converged_at = None
    log = []
    for step in range(cfg.steps):
        xs = rng.standard_normal((cfg.batch, n, d))
        net = AntisymNetwork.from_flat(theta, K, n, d)
        mse, g_mse = antisym_network_grad(net, xs, target_values(target, xs))
        pen1 = max(mse - cfg.epsilon, 0.0)
        pen2 = phi_tilde_network(net)
        log.append((step, pen1 + cfg.lam * pen2, pen1, pen2))
        streak = streak + 1 if pen1 <= cfg.converge_tol else 0
        if streak >= cfg.window_steps and converged_at is None:
            converged_at = step
        grad = (g_mse if mse > cfg.epsilon else 0.0) + cfg.lam * _phi_tilde_subgradient(net)
        norm = float(np.linalg.norm(grad))
        if not math.isfinite(norm):
            raise TrainingError("non-finite gradient during training", [row[1] for row in log[-20:]])
        if norm > cfg.clip:
            grad = grad * (cfg.clip / norm)
        lr = 0.5 * cfg.lr * (1.0 + math.cos(math.pi * step / cfg.steps))
        velocity = cfg.momentum * velocity - lr * grad
        theta = theta + velocity
    return AntisymNetwork.from_flat(theta, K, n, d), converged_at, log


def mc_residual(net, target, n_samples, seed, chunk=4096):
    """Monte Carlo ``||net - target||^2`` and its standard error."""
    sq = []
    for xs in gaussian_configurations(net.n, net.d, n_samples, seed, chunk):
        diff = antisym_network_eval(net, xs) - target_values(target, xs)
        sq.append(diff * diff)
    sq = np.concatenate(sq)
    return float(np.mean(sq)), float(np.std(sq, ddof=1) / math.sqrt(sq.size))


def estimate_ab_norm(target, m, cfg=TrainConfig(), n=None, d=None):
    """Train width-``m`` networks and report ``phi_tilde`` and the residual of the best run.

    ``target`` is a :class:`HermiteTarget`, an :class:`AntisymNetwork` or any
    vectorised callable (then ``n`` and ``d`` are required). Runs are ranked
    by the final value of the full loss on a fresh evaluation sample.
    """
    n = getattr(target, "n", n)
    d = getattr(target, "d", d)
    if n is None or d is None:
        raise InputError("n and d are needed for a plain callable target")
    if int(m) < 1:
        raise InputError("width must be at least 1")
    best = None
    for r in range(cfg.restarts):
        seed = cfg.seed * 7919 + r
        net, converged_at, log = _train_once(target, n, d, int(m), cfg, seed)
        res, se = mc_residual(net, target, cfg.eval_samples, seed=10_000 + seed)
        est = phi_tilde_network(net)
        run = NormEstimate(est, res, se, converged_at is not None, converged_at, net, log)
        score = max(res - cfg.epsilon, 0.0) + cfg.lam * est
        if best is None or score < best[0]:
            best = (score, run)
    return best[1]
