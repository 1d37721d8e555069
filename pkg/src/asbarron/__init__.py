"""Sums of plane-wave Slater determinants for anti-symmetric Barron functions."""

from ._errors import (
    AsBarronError,
    CapabilityError,
    DegenerateAtomError,
    DegenerateMeasureError,
    InputError,
    NumericalError,
    TrainingError,
)
from ._kernels import BACKEND_NAME
from .activations import (
    RidgeSpec,
    fourier_inversion_check,
    highpass_relu,
    lowpass_relu,
    relu,
    ridge_eval,
    sine_integral,
    softplus,
)
from .bounds import (
    admissible_p,
    detbound_check,
    eigenvalue_bound_check,
    lowrank_terms,
    norm_curve,
)
from .measures import (
    BarronAtom,
    BarronMeasure,
    ComplexMeasureSpec,
    TruncatedAntiRidge,
    antisymmetrize_measure,
    canonicalize,
    evaluate_f_rho,
    maurey_sample,
    phi,
    phi_tilde,
    psi_gamma_eval,
    total_variation,
    truncated_antiridge_eval,
)
from .planewave import (
    SlaterSum,
    antisymmetrize_pointwise,
    evaluate_planewave_slater,
    mc_l2_distance,
    single_particle_overlap,
    slater_norm_sq,
    slater_overlap,
    slater_sum_inner,
)

__version__ = "0.1.0"
