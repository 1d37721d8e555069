from .fitting import FitResult, TrainConfig, fit_slater_sum
from .hermite import (
    HermiteTarget,
    ground_state_orbitals,
    hermite_orbital_overlap,
    hermite_values,
    slater_vs_hermite_inner,
    target_eval,
)
from .network import (
    AntisymNetwork,
    NormEstimate,
    antisym_network_eval,
    antisym_network_grad,
    estimate_ab_norm,
    phi_tilde_network,
)
from .scatter import ScatterRow, default_windows, scatter_targets, rate_constant, theorem_scatter

__all__ = [
    "AntisymNetwork",
    "FitResult",
    "HermiteTarget",
    "NormEstimate",
    "ScatterRow",
    "TrainConfig",
    "antisym_network_eval",
    "antisym_network_grad",
    "default_windows",
    "estimate_ab_norm",
    "fit_slater_sum",
    "ground_state_orbitals",
    "hermite_orbital_overlap",
    "hermite_values",
    "phi_tilde_network",
    "scatter_targets",
    "slater_vs_hermite_inner",
    "target_eval",
    "rate_constant",
    "theorem_scatter",
]
