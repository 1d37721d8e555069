"""End-to-end construction of a Slater-sum approximant from a Barron measure.

canonicalise (l_inf) -> complex measure at gamma = 1/(2 sqrt d) -> Maurey
sample of m plane-wave Slaters -> Monte Carlo distance to ``AS f_rho``.
"""

from dataclasses import dataclass
from importlib import resources
import math

import numpy as np

from .infrared import norm_series, truncation_gap_bound
from .measures import (
    ComplexMeasureSpec,
    antisym_f_rho,
    canonicalize,
    default_gamma,
    loads_measure,
    maurey_sample,
    phi,
    psi_gamma_eval,
    total_variation,
)
from .planewave import gaussian_configurations, l2_from_squares

SHIPPED_MEASURES = ("single_atom_n3d1", "three_atom_n3d1")


def shipped_measure(name):
    """One of the example measures bundled with the package."""
    if name not in SHIPPED_MEASURES:
        raise KeyError(f"unknown shipped measure {name!r}; choose from {SHIPPED_MEASURES}")
    text = resources.files("asbarron").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    return loads_measure(text, allow_empty=False)


def rate_constant(d):
    """``C = 2 sqrt(d) / pi``."""
    return 2.0 * math.sqrt(d) / math.pi


def truncation_bound(rho, gamma):
    """``sum |a| * (1/pi) int_0^gamma ||a_{t w}|| / t^2 dt`` over the atoms of ``rho``.

    Infinite for ``n < 3``, where the affine part of the low-pass ridge
    survives anti-symmetrisation.
    """
    if rho.n < 3:
        return math.inf
    total = 0.0
    for a, w in zip(rho.a, rho.waves()):
        if a != 0:
            total += abs(float(a)) * truncation_gap_bound(w, gamma, norm_series(w))
    return total


@dataclass(frozen=True)
class ConstructReport:
    m: int
    gamma: float
    error: float  # Monte Carlo ||psi_m - AS f_rho||
    std_error: float
    phi: float
    total_variation: float
    sampling_bound: float  # phi C / sqrt(m)
    truncation_bound: float

    @property
    def rhs(self):
        return self.sampling_bound + self.truncation_bound

    @property
    def slack(self):
        """Right side plus three standard errors minus the error; non-negative passes."""
        return self.rhs + 3.0 * self.std_error - self.error


def construct(rho, m, seed=0, n_samples=1 << 16, sample_seed=None, gamma=None):
    """Build ``psi_m`` from ``rho`` and measure its distance to ``AS f_rho``.

    Returns the Slater sum and a :class:`ConstructReport`.
    """
    canon = canonicalize(rho)
    gamma = default_gamma(rho.d) if gamma is None else gamma
    mu = ComplexMeasureSpec(canon, gamma)
    approx = maurey_sample(mu, m, seed)
    sq = []
    for xs in gaussian_configurations(rho.n, rho.d, n_samples, seed if sample_seed is None else sample_seed):
        diff = approx(xs) - antisym_f_rho(rho, xs)
        sq.append(np.abs(diff) ** 2)
    err, se = l2_from_squares(np.concatenate(sq))
    p = phi(canon)
    report = ConstructReport(
        m=int(m),
        gamma=float(gamma),
        error=err,
        std_error=se,
        phi=p,
        total_variation=total_variation(mu),
        sampling_bound=p * rate_constant(rho.d) / math.sqrt(m),
        truncation_bound=truncation_bound(canon, gamma),
    )
    return approx, report


def maurey_errors(rho, ms, seeds, gamma=None, n_samples=1 << 14, sample_seed=12345):
    """``||psi_m - psi_gamma||`` for every ``m`` in ``ms`` and seed in ``seeds``.

    All draws are compared on one common Gaussian sample so the Monte
    Carlo noise is shared across ``m``. Returns an array ``(len(ms), len(seeds))``
    and the total variation of the complex measure.
    """
    canon = canonicalize(rho)
    gamma = default_gamma(rho.d) if gamma is None else gamma
    mu = ComplexMeasureSpec(canon, gamma)
    xs = np.concatenate(list(gaussian_configurations(rho.n, rho.d, n_samples, sample_seed)))
    target = psi_gamma_eval(canon, gamma, xs)
    out = np.empty((len(ms), len(seeds)))
    for i, m in enumerate(ms):
        for j, s in enumerate(seeds):
            approx = maurey_sample(mu, m, seed=s)
            out[i, j] = math.sqrt(float(np.mean(np.abs(approx(xs) - target) ** 2)))
    return out, total_variation(mu)
