"""Lower bounds on the decoding complexity of LDPC ensembles.

The complexity per information bit per iteration is measured by
``chi_D = (1 - R_d) / R_d * a_R``. For a gap to capacity ``eps`` (with
``R_d = (1 - eps) * Cbar``) any ensemble must satisfy

    chi_D(eps) >= K1 + K2 * ln(1 / eps).

The punctured variants are obtained by applying the parallel-channel bound
to the decomposition in :mod:`ldpcbound.puncturing`; they are marked
``rp_derived`` / ``ip_derived`` to make that provenance visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import BEC, ChannelModel, ParallelAssignment, average_capacity, capacity, mixed_moments
from .degree_distributions import EnsembleSpec, average_right_degree, design_rate
from .errors import DegenerateBoundError, DomainError
from .puncturing import PuncturingPattern, ip_decomposition, rp_decomposition

GENERIC = "generic"
BEC_VARIANT = "bec_variant"
RP_DERIVED = "rp_derived"
IP_DERIVED = "ip_derived"
NOTES = (GENERIC, BEC_VARIANT, RP_DERIVED, IP_DERIVED)


@dataclass(frozen=True)
class ComplexityBound:
    k1: float
    k2: float
    average_capacity: float
    note: str = GENERIC

    def __post_init__(self):
        if self.note not in NOTES:
            raise DomainError(f"unknown note {self.note!r}")
        if not self.k2 > 0:
            raise DegenerateBoundError(f"K2 = {self.k2!r} is not positive")

    def to_json(self) -> dict:
        return {
            "k1": self.k1,
            "k2": self.k2,
            "average_capacity": self.average_capacity,
            "note": self.note,
        }


def decoding_complexity(e: EnsembleSpec) -> float:
    """(1 - R_d) / R_d times the average right degree."""
    r = design_rate(e)
    return (1.0 - r) / r * average_right_degree(e.rho)


def multiplicative_gap(rate: float, cbar: float) -> float:
    """eps = 1 - R / Cbar."""
    if not 0.0 < cbar <= 1.0:
        raise DomainError(f"capacity {cbar!r} outside (0, 1]")
    return 1.0 - rate / cbar


def parallel_complexity_bound(assign: ParallelAssignment, bec_variant: bool | None = None) -> ComplexityBound:
    """K1, K2 and Cbar for LDPC codes over parallel channels.

    ``bec_variant`` defaults to True exactly when every channel is a BEC; it
    drops the 1/(2 ln 2) factor inside the logarithm of K1. Passing False
    on an all-BEC assignment gives the generic (weaker) coefficient.
    """
    all_bec = all(ch.kind == BEC for ch in assign.channels)
    if bec_variant is None:
        bec_variant = all_bec
    elif bec_variant and not all_bec:
        raise DomainError("the BEC variant needs erasure channels only")
    for ch in assign.channels:
        if capacity(ch).value <= 0.0:
            raise DomainError(f"channel {ch.to_json()} has zero capacity")
    cbar = average_capacity(assign).value
    s1 = float(mixed_moments(list(zip(assign.q, assign.channels)), 1)[0][0])
    if not 0.0 < s1 < 1.0:
        raise DegenerateBoundError(f"sum q_j g_j1 = {s1!r}; its logarithm is singular")
    if cbar >= 1.0:
        raise DegenerateBoundError("average capacity is one; there is no gap to measure")
    log_s1 = math.log(s1)
    factor = 1.0 if bec_variant else 1.0 / (2.0 * math.log(2.0))
    k2 = -(1.0 - cbar) / (cbar * log_s1)
    k1 = -(1.0 - cbar) * math.log(factor * (1.0 - cbar) / cbar) / (cbar * log_s1)
    return ComplexityBound(k1, k2, cbar, BEC_VARIANT if bec_variant else GENERIC)


def complexity_lower_bound_at(b: ComplexityBound, eps: float) -> float:
    """K1 + K2 ln(1/eps) for a multiplicative gap eps in (0, 1]."""
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"gap {eps!r} outside (0, 1]")
    return b.k1 + b.k2 * math.log(1.0 / eps)


def _retag(b: ComplexityBound, note: str) -> ComplexityBound:
    return ComplexityBound(b.k1, b.k2, b.average_capacity, note)


def rp_complexity_bound(e: EnsembleSpec, ch: ChannelModel, alpha: float, p_pct: float) -> ComplexityBound:
    """Random-puncturing bound, via the two-channel decomposition."""
    return _retag(parallel_complexity_bound(rp_decomposition(e, ch, alpha, p_pct)), RP_DERIVED)


def ip_complexity_bound(e: EnsembleSpec, ch: ChannelModel, pattern: PuncturingPattern) -> ComplexityBound:
    """Intentional-puncturing bound, via the per-degree decomposition."""
    return _retag(parallel_complexity_bound(ip_decomposition(e, ch, pattern)), IP_DERIVED)
