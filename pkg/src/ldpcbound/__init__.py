"""Rate and complexity bounds for LDPC ensembles over parallel MBIOS channels,
punctured-code specializations, and density-evolution thresholds."""

from .channels import BoundResult, ChannelModel, ParallelAssignment, capacity, g_moment, g_moments
from .complexity_bounds import (
    ComplexityBound,
    complexity_lower_bound_at,
    decoding_complexity,
    ip_complexity_bound,
    parallel_complexity_bound,
    rp_complexity_bound,
)
from .degree_distributions import DegreePolynomial, EnsembleSpec, design_rate
from .density_evolution import DEConfig, de_threshold, run_de
from .errors import InputError, LdpcBoundError, NumericalError
from .puncturing import PuncturingPattern, average_puncturing_rate, ip_decomposition, rp_decomposition
from .rate_bounds import bec_rate_bound, ip_rate_bound, parallel_rate_bound, rp_rate_bound
from .thresholds import (
    ThresholdResult,
    capacity_limit_threshold,
    eb_n0_from_sigma,
    fractional_gap,
    ml_threshold,
    sigma_from_eb_n0,
)

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "ChannelModel",
    "ComplexityBound",
    "DEConfig",
    "DegreePolynomial",
    "EnsembleSpec",
    "InputError",
    "LdpcBoundError",
    "NumericalError",
    "ParallelAssignment",
    "PuncturingPattern",
    "ThresholdResult",
    "average_puncturing_rate",
    "bec_rate_bound",
    "capacity",
    "capacity_limit_threshold",
    "complexity_lower_bound_at",
    "de_threshold",
    "decoding_complexity",
    "design_rate",
    "eb_n0_from_sigma",
    "fractional_gap",
    "g_moment",
    "g_moments",
    "ip_complexity_bound",
    "ip_decomposition",
    "ip_rate_bound",
    "ml_threshold",
    "parallel_complexity_bound",
    "parallel_rate_bound",
    "rp_complexity_bound",
    "rp_decomposition",
    "rp_rate_bound",
    "run_de",
    "sigma_from_eb_n0",
]
