"""Variable-bandwidth kernel regression with a Nadaraya-Watson baseline.

The bandwidth at observation ``X_i`` is ``h / alpha_i`` with
``alpha = c sqrt(p(q / c^2))`` and ``q = f sqrt(|r'|)``, which lowers the
bias from order ``h^2`` to ``h^4``.
"""

from .clipping import ClipSpec, clip_alpha, clip_p, in_region_drf, q_of
from .estimators import (
    BandwidthPlan,
    DegenerateDenominator,
    EstimateAtPoint,
    Sample,
    ideal_vb_estimate,
    nw_derivative,
    nw_estimate,
    pilot_alpha,
    pilot_q_hat,
    pr_density,
    true_vb_estimate,
    vb_density,
    vb_estimate,
    vb_weights,
)
from .kernels import EPANECHNIKOV, GAUSSIAN_TRUNCATED, TRICUBE, Kernel, get_kernel, kernel_moment
from .theory import (
    ExpansionReport,
    TrueModel,
    asymptotic_variance,
    expansion_check,
    optimal_bandwidth,
    theta_coefficient,
)

__all__ = [
    "ClipSpec",
    "clip_alpha",
    "clip_p",
    "in_region_drf",
    "q_of",
    "BandwidthPlan",
    "DegenerateDenominator",
    "EstimateAtPoint",
    "Sample",
    "ideal_vb_estimate",
    "nw_derivative",
    "nw_estimate",
    "pilot_alpha",
    "pilot_q_hat",
    "pr_density",
    "true_vb_estimate",
    "vb_density",
    "vb_estimate",
    "vb_weights",
    "EPANECHNIKOV",
    "GAUSSIAN_TRUNCATED",
    "TRICUBE",
    "Kernel",
    "get_kernel",
    "kernel_moment",
    "ExpansionReport",
    "TrueModel",
    "asymptotic_variance",
    "expansion_check",
    "optimal_bandwidth",
    "theta_coefficient",
]

__version__ = "0.1.0"
