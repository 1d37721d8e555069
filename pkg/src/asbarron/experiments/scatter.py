"""Norm-estimate versus fit-error scatter over windowed oscillator targets."""

from dataclasses import dataclass
import math

from .._errors import AsBarronError
from .fitting import TrainConfig, fit_slater_sum
from .hermite import HermiteTarget
from .network import estimate_ab_norm

SCATTER_FIELDS = (
    "window_center",
    "window_halfwidth",
    "ab_norm_estimate",
    "epsilon_achieved",
    "slater_fit_error",
    "opacity",
    "converged",
    "error",
)


@dataclass
class ScatterRow:
    window_center: str
    window_halfwidth: object
    ab_norm_estimate: float = math.nan
    epsilon_achieved: float = math.nan
    slater_fit_error: float = math.nan
    opacity: float = math.nan
    converged: bool = False
    error: str = ""

    def as_tuple(self):
        return tuple(getattr(self, name) for name in SCATTER_FIELDS)


def rate_constant(d):
    return 2.0 * math.sqrt(d) / math.pi


def default_windows(centers=(-0.5, 0.0, 0.5), halfwidths=(1.5, 2.25, 3.0)):
    return [(c, h) for c in centers for h in halfwidths]


def scatter_targets(n, d, windows):
    return [HermiteTarget.ground_state(n, d, window=w) for w in windows]


def scatter_row(target, m, cfg):
    """Fit error and norm estimate for one target; failures land in ``error``."""
    center, halfwidth = target.describe()
    row = ScatterRow(center, halfwidth)
    try:
        row.slater_fit_error = fit_slater_sum(target, m, cfg).error
        est = estimate_ab_norm(target, cfg.width, cfg)
    except (AsBarronError, ArithmeticError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    row.ab_norm_estimate = est.estimate
    row.epsilon_achieved = est.residual
    row.opacity = max(1.0 - est.residual, 0.0) ** 10
    row.converged = est.converged
    return row


def theorem_scatter(targets, m, cfg=TrainConfig(), mapper=map):
    """One :class:`ScatterRow` per target; ``mapper`` may be a pool's ``map``."""
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    return list(mapper(lambda t: scatter_row(t, m, cfg), targets))


def scatter_slack(row, m, d):
    """``estimate * C / sqrt(m) + 0.05 + sqrt(epsilon) - fit_error``; non-negative rows pass."""
    return (
        row.ab_norm_estimate * rate_constant(d) / math.sqrt(m)
        + 0.05
        + math.sqrt(max(row.epsilon_achieved, 0.0))
        - row.slater_fit_error
    )
