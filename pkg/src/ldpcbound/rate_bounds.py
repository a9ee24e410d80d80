"""Upper bounds on the design rate of LDPC ensembles over parallel channels.

All bounds share the shape

    R <= 1 - (1 - Cbar) / (1 - S / (2 ln 2)),
    S  = sum_{p>=1} Gamma(x_p) / (p (2p - 1)),

where ``Cbar`` is the average capacity and ``x_p`` is an edge-weighted
mixture of the channel moments g_p. The series is summed exactly up to a
cut-off P and the remainder is bracketed using that ``x_p`` is
nonincreasing in p and converges to the mass of infinite LLRs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import digamma

from .channels import (
    BEC,
    BoundResult,
    ChannelModel,
    ParallelAssignment,
    average_capacity,
    capacity,
    g_limit,
    g_moments_at,
    mixed_moments_at,
)
from .degree_distributions import (
    NODE,
    DegreePolynomial,
    EnsembleSpec,
    derivative_at_one,
    edge_to_node,
    evaluate,
)
from .errors import DegenerateBoundError, DomainError, InvalidChannelError
from .puncturing import (
    PuncturingPattern,
    average_puncturing_rate,
    edge_puncturing_rate,
    rp_xi,
)

__all__ = [
    "ParallelAssignment",
    "SeriesSum",
    "bec_rate_bound",
    "ip_rate_bound",
    "parallel_rate_bound",
    "rp_rate_bound",
    "series_sum",
]

TWO_LN2 = 2.0 * math.log(2.0)
SERIES_TOL = 1e-10
MAX_INDEX = 2.0**50
# (exact terms, geometric ratio - 1) tried in turn until the tail bracket fits
_STAGES = ((1024, 1 / 16), (4096, 1 / 64), (16384, 1 / 256))


@dataclass(frozen=True)
class SeriesSum:
    """Value of the Gamma-series with its error budget."""

    value: float
    truncation_error: float
    moment_error: float
    terms: int
    clamped: bool

    @property
    def error_bound(self) -> float:
        return self.truncation_error + self.moment_error


def tail_weight(P):
    """sum_{p > P} 1 / (p (2p - 1)), exact via the digamma function."""
    P = np.asarray(P, dtype=float)
    return digamma(P + 1.0) - digamma(P + 0.5)


def _as_node(gamma: DegreePolynomial) -> DegreePolynomial:
    return gamma if gamma.perspective == NODE else edge_to_node(gamma)


def _geometric_grid(P0: int, h: float) -> np.ndarray:
    pts = [float(P0)]
    while pts[-1] < MAX_INDEX:
        pts.append(min(MAX_INDEX, max(pts[-1] + 1.0, math.floor(pts[-1] * (1.0 + h)))))
    return np.array(pts)


def series_sum(
    gamma: DegreePolynomial,
    moments: Callable[[np.ndarray], tuple[np.ndarray, float, float]],
    tol: float = SERIES_TOL,
) -> SeriesSum:
    """Sum Gamma(x_p) / (p (2p-1)) over p >= 1 with a rigorous error bracket.

    ``moments(p)`` returns ``(x at the indices p, error bound on each x_p,
    lim x_p)``; x_p must be nonincreasing in p. Terms are summed exactly up
    to some P. Beyond P the indices are cut into blocks (p_k, p_{k+1}], and
    on each block Gamma(x_p) lies between its values at the two ends; past
    the last block it lies between Gamma(x_inf) and the last value. The
    midpoint of the resulting interval is returned and half its width
    is the truncation error. Stages with more exact terms and finer blocks
    are tried until that width is below ``tol``; if none reaches it, the
    finest result is returned with its actual (larger) error.
    Arguments above one (possible with rounded inputs) are clamped and
    the result is flagged.
    """
    gamma = _as_node(gamma)
    slope = derivative_at_one(gamma)
    best = None
    for P0, h in _STAGES:
        p = np.arange(1, P0 + 1, dtype=float)
        x, x_err, x_inf = moments(p)
        clamped = bool(np.any(x > 1.0)) or x_inf > 1.0
        x = np.clip(x, 0.0, 1.0)
        x_inf = min(max(x_inf, 0.0), 1.0)
        g = evaluate(gamma, x)
        g_inf = evaluate(gamma, x_inf)
        tails = tail_weight(p)
        w = 1.0 / (p * (2.0 * p - 1.0))
        hit = np.nonzero((g - g_inf) * tails < tol)[0]
        if hit.size:
            # plain bracket after P exact terms is enough
            P = int(hit[0]) + 1
            lo, hi = g_inf * tails[P - 1], g[P - 1] * tails[P - 1]
            partial = math.fsum((g[:P] * w[:P]).tolist())
            best = (partial + 0.5 * (lo + hi), 0.5 * (hi - lo), P, clamped)
            break
        grid = _geometric_grid(P0, h)
        xg, xg_err, _ = moments(grid)
        clamped = clamped or bool(np.any(xg > 1.0))
        xg = np.minimum.accumulate(np.concatenate([[x[-1]], np.clip(xg[1:], 0.0, 1.0)]))
        gg = evaluate(gamma, xg)
        rg = tail_weight(grid)
        blocks = rg[:-1] - rg[1:]
        lo = math.fsum((gg[1:] * blocks).tolist()) + g_inf * rg[-1]
        hi = math.fsum((gg[:-1] * blocks).tolist()) + gg[-1] * rg[-1]
        partial = math.fsum((g * w).tolist())
        x_err = max(x_err, xg_err)
        best = (partial + 0.5 * (lo + hi), 0.5 * (hi - lo), int(grid[-1]), clamped)
        if hi - lo < tol:
            break
    value, trunc, terms, clamped = best
    return SeriesSum(
        value=value,
        truncation_error=trunc,
        moment_error=slope * x_err * TWO_LN2,
        terms=terms,
        clamped=clamped,
    )


def _rate_from_series(numerator: BoundResult, series: SeriesSum, what: str) -> BoundResult:
    """Evaluate 1 - N / (1 - S / 2ln2) and propagate the error intervals."""
    N, S = numerator.value, series.value
    if N <= 0.0:
        # zero numerator: the bound is the trivial value one
        return BoundResult(1.0, numerator.error_bound, series.clamped)
    den = 1.0 - S / TWO_LN2
    if den <= 0.0:
        raise DegenerateBoundError(f"{what}: denominator {den!r} is not positive")

    def f(n, s):
        d = 1.0 - s / TWO_LN2
        if d <= 0.0:
            return -math.inf
        return 1.0 - n / d

    val = f(N, S)
    dn, ds = numerator.error_bound, series.error_bound
    # f decreases in both arguments
    err = max(abs(f(N - dn, S - ds) - val), abs(val - f(N + dn, S + ds)))
    return BoundResult(val, err, series.clamped)


def parallel_rate_bound(
    assign: ParallelAssignment,
    gamma_cap: DegreePolynomial,
    series_tol: float = SERIES_TOL,
) -> BoundResult:
    """Design-rate upper bound for LDPC codes over J parallel MBIOS channels."""
    cbar = average_capacity(assign)
    numerator = BoundResult(1.0 - cbar.value, cbar.error_bound)
    weighted = list(zip(assign.q, assign.channels))
    series = series_sum(gamma_cap, lambda p: mixed_moments_at(weighted, p), series_tol)
    return _rate_from_series(numerator, series, "parallel rate bound")


def bec_rate_bound(assign: ParallelAssignment, gamma_cap: DegreePolynomial) -> BoundResult:
    """Closed form of the parallel bound when every channel is a BEC."""
    if any(ch.kind != BEC for ch in assign.channels):
        raise InvalidChannelError("bec_rate_bound needs erasure channels only")
    eps = np.array([ch.param for ch in assign.channels])
    num = math.fsum((assign.p * eps).tolist())
    if num == 0.0:
        return BoundResult(1.0, 0.0)
    arg = 1.0 - math.fsum((assign.q * eps).tolist())
    den = 1.0 - evaluate(_as_node(gamma_cap), arg)
    if den <= 0.0:
        raise DegenerateBoundError("BEC rate bound: Gamma(1 - sum q eps) equals one")
    return BoundResult(1.0 - num / den, 0.0)


def _single_channel_moments(ch: ChannelModel, scale: float):
    def moments(p):
        g, err = g_moments_at(ch, p)
        return scale * g, scale * err, scale * g_limit(ch)

    return moments


def _require_plain(ch: ChannelModel) -> None:
    if ch.erasure_prefix:
        raise DomainError("punctured-code bounds take the plain channel")


def rp_rate_bound(
    e: EnsembleSpec,
    ch: ChannelModel,
    alpha: float,
    p_pct: float,
    series_tol: float = SERIES_TOL,
) -> BoundResult:
    """Bound on the design rate of randomly punctured LDPC codes.

    A fraction ``alpha`` of the code bits is pre-selected and punctured at
    rate ``p_pct``. The returned value bounds the punctured design rate.
    """
    _require_plain(ch)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha {alpha!r} outside [0, 1]")
    if not 0.0 <= p_pct < 1.0:
        raise DomainError(f"puncturing rate {p_pct!r} outside [0, 1)")
    kept = 1.0 - alpha * p_pct
    scale = 1.0 - p_pct + rp_xi(e, alpha, p_pct)
    cap = capacity(ch)
    numerator = BoundResult(1.0 - kept * cap.value, kept * cap.error_bound)
    series = series_sum(e.gamma, _single_channel_moments(ch, scale), series_tol)
    inner = _rate_from_series(numerator, series, "random puncturing bound")
    return BoundResult(inner.value / kept, inner.error_bound / kept, inner.clamped)


def ip_rate_bound(
    e: EnsembleSpec,
    ch: ChannelModel,
    pattern: PuncturingPattern,
    series_tol: float = SERIES_TOL,
) -> BoundResult:
    """Bound on the design rate of intentionally punctured LDPC codes."""
    _require_plain(ch)
    p0 = average_puncturing_rate(pattern, e.lam_node)
    if p0 >= 1.0:
        raise DomainError("every code bit is punctured")
    kept = 1.0 - p0
    scale = 1.0 - edge_puncturing_rate(pattern, e.lam)
    cap = capacity(ch)
    numerator = BoundResult(1.0 - kept * cap.value, kept * cap.error_bound)
    series = series_sum(e.gamma, _single_channel_moments(ch, scale), series_tol)
    inner = _rate_from_series(numerator, series, "intentional puncturing bound")
    return BoundResult(inner.value / kept, inner.error_bound / kept, inner.clamped)
