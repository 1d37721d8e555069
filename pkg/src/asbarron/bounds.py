"""Certified inequalities for the exponential Gram matrix ``(exp(v_i . w_j))``.

Entrywise Taylor expansion splits the matrix into terms ``Q_k`` of rank at
most ``binom(k+d-1, d-1)`` and norm at most ``n mu^k / k!``. Weyl's
inequality then bounds the trailing eigenvalues, and the product of
eigenvalues bounds the determinant. Each check below evaluates one side
numerically and the other from the closed-form bound.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._errors import CapabilityError, InputError
from ._mpdet import gram_exp_logdet
from .planewave import as_wave_matrix, slater_log_norm_sq

MAX_ORDER = 60
RANK_RTOL = 1e-9
_EPS = np.finfo(np.float64).eps
# symmetric eigensolvers are backward stable: |error| <~ c n eps ||A||
_EIG_ALLOWANCE = 64 * _EPS


def compositions(k, d):
    """Weak compositions of ``k`` into ``d`` parts in colexicographic order."""
    if d == 1:
        yield (k,)
        return
    for last in range(k + 1):
        for head in compositions(k - last, d - 1):
            yield head + (last,)


def mu_parameter(v, w):
    return float(np.max(np.abs(v)) * np.max(np.abs(w)) * v.shape[1])


@dataclass(frozen=True)
class LowRankTerm:
    k: int
    matrix: np.ndarray
    rank_bound: int
    norm_bound: float


def lowrank_terms(v, w, k_max):
    """Terms ``Q_0, ..., Q_{k_max}`` of the expansion of ``exp(v_i . w_j)``."""
    v = as_wave_matrix(v, "v")
    w = as_wave_matrix(w, "w")
    if v.shape != w.shape:
        raise InputError(f"shape mismatch: {v.shape} vs {w.shape}")
    if not 0 <= k_max <= MAX_ORDER:
        raise CapabilityError(f"k_max={k_max} outside [0, {MAX_ORDER}]")
    n, d = v.shape
    mu = mu_parameter(v, w)
    terms = []
    for k in range(k_max + 1):
        Q = np.zeros((n, n))
        for alpha in compositions(k, d):
            left = np.prod(v ** np.array(alpha), axis=1)
            right = np.prod(w ** np.array(alpha), axis=1)
            scale = 1.0 / math.prod(math.factorial(a) for a in alpha)
            Q += scale * np.outer(left, right)
        terms.append(LowRankTerm(k, Q, math.comb(k + d - 1, d - 1), n * mu**k / math.factorial(k)))
    return terms


def tail_sum(mu, K, tol=1e-300):
    """``sum_{k > K} mu^k / k!`` summed directly (no cancellation against ``e^mu``)."""
    term = mu ** (K + 1) / math.factorial(K + 1) if mu else 0.0
    total = 0.0
    k = K + 1
    while term > tol * max(total, 1e-300) and term != 0.0:
        total += term
        k += 1
        term *= mu / k
    return total


def reconstruction_tail_bound(n, mu, K):
    return n * tail_sum(mu, K)


def numerical_rank(M, rtol=RANK_RTOL):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


@dataclass(frozen=True)
class LowRankReport:
    k: int
    rank: int
    rank_bound: int
    spectral_norm: float
    norm_bound: float

    @property
    def ok(self):
        return self.rank <= self.rank_bound and self.spectral_norm <= self.norm_bound * (1 + 1e-9)


def check_lowrank(v, w, K):
    """Rank and norm reports per term plus ``(frobenius_error, tail_bound)``."""
    terms = lowrank_terms(v, w, K)
    reports = [
        LowRankReport(t.k, numerical_rank(t.matrix), t.rank_bound, float(np.linalg.norm(t.matrix, 2)), t.norm_bound)
        for t in terms
    ]
    exact = np.exp(np.asarray(v) @ np.asarray(w).T)
    approx = np.sum([t.matrix for t in terms], axis=0)
    err = float(np.linalg.norm(exact - approx))
    return reports, err, reconstruction_tail_bound(len(exact), mu_parameter(as_wave_matrix(v), as_wave_matrix(w)), K)


@dataclass(frozen=True)
class EigenvalueReport:
    eigenvalues: np.ndarray  # absolute values, descending
    L: int
    lambda_L: float
    bound_L: float
    lambda_0: float
    bound_0: float
    allowance: float  # eigensolver round-off budget

    @property
    def margin(self):
        return self.bound_L - self.lambda_L

    @property
    def resolvable(self):
        """Whether the bound exceeds the round-off floor of the eigensolver."""
        return self.bound_L > self.allowance

    @property
    def ok(self):
        return self.lambda_L <= self.bound_L + self.allowance and self.lambda_0 <= self.bound_0 * (1 + 1e-12)


def eigenvalue_bound_check(w, p):
    """Compare ``lambda_L`` of ``(exp(w_i . w_j))`` with ``(2n/p!) mu^p``, ``L = binom(p+d-1, d)``."""
    w = as_wave_matrix(w)
    n, d = w.shape
    p = int(p)
    mu = d * float(np.max(np.abs(w))) ** 2
    if p < 0:
        raise InputError("p must be non-negative")
    if mu > 0.5:
        raise InputError(f"requires mu = d*|w|_inf^2 <= 1/2, got {mu!r}")
    L = math.comb(p + d - 1, d)
    if L >= n:
        raise InputError(f"requires L = binom(p+d-1, d) < n, got L={L}, n={n}")
    lam = np.sort(np.abs(np.linalg.eigvalsh(np.exp(w @ w.T))))[::-1]
    return EigenvalueReport(
        eigenvalues=lam,
        L=L,
        lambda_L=float(lam[L]),
        bound_L=2.0 * n / math.factorial(p) * mu**p,
        lambda_0=float(lam[0]),
        bound_0=n * math.exp(mu),
        allowance=_EIG_ALLOWANCE * n * float(lam[0]),
    )


def detbound_gamma(d):
    return 1.0 / (2.0 * math.sqrt(d))


def admissible_p(n, d):
    """Smallest ``p`` with ``p! >= 4 n^2`` and ``binom(p+d-1, d) <= n/2``, or ``None``.

    The rank condition only gets harder as ``p`` grows, so if the
    smallest ``p`` satisfying the factorial condition fails it, no ``p`` works.
    """
    p = 0
    while math.factorial(p) < 4 * n * n:
        p += 1
    return p if 2 * math.comb(p + d - 1, d) <= n else None


@dataclass(frozen=True)
class DetBoundReport:
    n: int
    d: int
    p: int
    w_inf: float
    log_det: float
    log_bound: float

    @property
    def margin(self):
        return self.log_bound - self.log_det

    @property
    def ok(self):
        return self.margin > 0


def detbound_check(w, p):
    """``log det(exp(w_i . w_j))`` against ``p n log(|w|_inf / (2 gamma))``.

    The determinant is evaluated in adaptive precision: at the sizes
    where the bound is non-vacuous it lies thousands of orders of
    magnitude below the float64 LU round-off floor.
    """
    w = as_wave_matrix(w)
    n, d = w.shape
    p = int(p)
    gamma = detbound_gamma(d)
    w_inf = float(np.max(np.abs(w)))
    if 2 * math.comb(p + d - 1, d) > n:
        raise InputError(f"requires binom(p+d-1, d) <= n/2 (p={p}, n={n}, d={d})")
    if math.factorial(p) < 4 * n * n:
        raise InputError(f"requires p! >= 4 n^2 (p={p}, n={n})")
    if w_inf > gamma:
        raise InputError(f"requires |w|_inf <= gamma = {gamma!r}, got {w_inf!r}")
    log_bound = p * n * math.log(w_inf / (2 * gamma)) if w_inf > 0 else -math.inf
    if w_inf == 0 or len(np.unique(w, axis=0)) < n:
        log_det = -math.inf
    else:
        sign, log_det = gram_exp_logdet(w)
        if sign <= 0:
            log_det = -math.inf
    return DetBoundReport(n, d, p, w_inf, log_det, log_bound)


@dataclass
class SweepRow:
    n: int
    d: int
    p: int | None
    w_inf: float
    log_det: float = math.nan
    log_bound: float = math.nan
    margin: float = math.nan
    error: str = ""
    extra: dict = field(default_factory=dict)


def scaled_random_wave(n, d, w_inf, seed):
    rng = np.random.Generator(np.random.Philox(key=seed))
    w = rng.standard_normal((n, d))
    return w * (w_inf / np.max(np.abs(w)))


def bound_cell(n, d, w_inf, seed=0):
    """One cell of the determinant-bound sweep; infeasible cells carry an error note."""
    p = admissible_p(n, d)
    if w_inf is None:
        w_inf = detbound_gamma(d) / 2
    if p is None:
        return SweepRow(n, d, None, w_inf, error="infeasible: no p with p! >= 4n^2 and binom(p+d-1,d) <= n/2")
    try:
        rep = detbound_check(scaled_random_wave(n, d, w_inf, seed), p)
    except (InputError, ArithmeticError) as exc:
        return SweepRow(n, d, p, w_inf, error=str(exc))
    return SweepRow(n, d, p, w_inf, rep.log_det, rep.log_bound, rep.margin)


def bound_sweep_cells(ns=(20, 30, 40), ds=(1, 2), w_infs=(0.05, 0.1, 0.2, None)):
    """Parameter tuples ``(n, d, w_inf, seed)``; ``None`` stands for ``gamma/2``."""
    cells = []
    for n in ns:
        for d in ds:
            for i, w_inf in enumerate(w_infs):
                wi = detbound_gamma(d) / 2 if w_inf is None else float(w_inf)
                cells.append((n, d, wi, 1000 * n + 10 * d + i))
    return cells


def bound_sweep(ns=(20, 30, 40), ds=(1, 2), w_infs=(0.05, 0.1, 0.2, None), mapper=map):
    return list(mapper(lambda cell: bound_cell(*cell), bound_sweep_cells(ns, ds, w_infs)))


@dataclass(frozen=True)
class NormCurve:
    theta: np.ndarray
    norm_sq: np.ndarray
    log_norm_sq: np.ndarray


def norm_curve(w, theta_grid):
    """``(theta, ||a_{theta w}||^2)`` for a wave matrix with ``||w||_inf = 1``."""
    w = as_wave_matrix(w)
    if abs(float(np.max(np.abs(w))) - 1.0) > 1e-12:
        raise InputError("norm_curve expects ||w||_inf = 1")
    theta = np.asarray(theta_grid, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(theta)):
        raise InputError("theta grid must be finite")
    logs = np.array([slater_log_norm_sq(t * w) for t in theta])
    return NormCurve(theta, np.exp(logs), logs)


def norm_curve_log_bound(n, d, theta):
    """``p n log(|theta| / (2 gamma))`` for ``|theta| <= gamma`` when ``p`` is admissible, else ``None``."""
    p = admissible_p(n, d)
    gamma = detbound_gamma(d)
    if p is None or abs(theta) > gamma:
        return None
    return p * n * math.log(abs(theta) / (2 * gamma)) if theta else -math.inf
