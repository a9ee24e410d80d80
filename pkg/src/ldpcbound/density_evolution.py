"""Quantized density evolution for sum-product decoding.

Messages are LLRs on the uniform grid ``k * step``, ``k = -K..K`` with
``K = L / step``; the end bins hold everything beyond +-L and are treated as
perfectly reliable. The variable-node update is a convolution (done with
FFTs). The check-node update combines two messages at a time with the exact
tanh rule ``l = phi(phi(|a|) + phi(|b|))``, ``phi(x) = ln coth(x / 2)``,
rounded back to the grid through a precomputed index table; the
(d-1)-fold combination is built by repeated halving.

The same machinery runs the BEC, whose densities live on {0, +L}.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.stats import norm

from .channels import BEC, BIAWGN, ChannelModel
from .degree_distributions import EDGE, DegreePolynomial, EnsembleSpec
from .errors import BracketError, DomainError, InvalidChannelError
from .puncturing import PuncturingPattern, punctured_design_rate

CONVERGED = "converged"
PLATEAU = "plateau"
MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class DEConfig:
    L: float = 30.0
    step: float = 2.0**-5
    max_iters: int = 2000
    target_error: float = 1e-9
    plateau_window: int = 200
    plateau_rel: float = 1e-4

    def __post_init__(self):
        if not (self.L > 0 and self.step > 0 and self.max_iters > 0 and self.target_error > 0):
            raise DomainError("DE configuration values must be positive")
        k = self.L / self.step
        if abs(k - round(k)) > 1e-9 or round(k) < 2:
            raise DomainError(f"L / step = {k!r} must be an integer >= 2")

    @property
    def K(self) -> int:
        return int(round(self.L / self.step))

    def refined(self) -> "DEConfig":
        """Half the step and twice the range."""
        return DEConfig(2 * self.L, self.step / 2, self.max_iters, self.target_error,
                        self.plateau_window, self.plateau_rel)


@dataclass(frozen=True)
class QuantizedDensity:
    """Probability masses on the LLR grid ``k * step``, ``k = -K..K``."""

    masses: np.ndarray
    step: float

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size % 2 == 0:
            raise DomainError("masses must be a 1-d array of odd length")
        object.__setattr__(self, "masses", m)

    @property
    def K(self) -> int:
        return self.masses.size // 2

    @property
    def grid(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1) * self.step

    def total(self) -> float:
        return float(self.masses.sum())

    def mean(self) -> float:
        return float(self.grid @ self.masses)

    def error_probability(self) -> float:
        return error_probability(self)

    def symmetry_defect(self) -> float:
        """max |a(-l) - e^{-l} a(l)| over the interior grid (diagnostic only)."""
        K = self.K
        pos = self.masses[K + 1 : 2 * K]
        neg = self.masses[K - 1 : 0 : -1]
        l = np.arange(1, K) * self.step
        return float(np.max(np.abs(neg - np.exp(-l) * pos), initial=0.0))


def _check_grid(*dens: QuantizedDensity) -> None:
    first = dens[0]
    for d in dens[1:]:
        if d.masses.size != first.masses.size or d.step != first.step:
            raise DomainError("densities live on different grids")


def error_probability(d: QuantizedDensity) -> float:
    """Mass on negative LLRs plus half the mass at zero."""
    K = d.K
    return float(d.masses[:K].sum() + 0.5 * d.masses[K])


def initial_density(ch: ChannelModel, pi_j: float, cfg: DEConfig) -> QuantizedDensity:
    """Channel LLR density seen by a bit punctured with probability ``pi_j``."""
    if not 0.0 <= pi_j <= 1.0:
        raise DomainError(f"puncturing rate {pi_j!r} outside [0, 1]")
    K, step = cfg.K, cfg.step
    out = np.zeros(2 * K + 1)
    if ch.kind == BIAWGN:
        edges = (np.arange(-K, K + 2) - 0.5) * step
        cdf = norm.cdf(edges, ch.llr_mean, ch.llr_std)
        out = np.diff(cdf)
        out[0] += cdf[0]
        out[-1] += 1.0 - cdf[-1]
        keep = 1.0 - ch.erasure_prefix
        out *= keep
        out[K] += ch.erasure_prefix
    elif ch.kind == BEC:
        out[K] = ch.param
        out[-1] = 1.0 - ch.param
    else:
        raise InvalidChannelError(f"density evolution supports BIAWGN and BEC, not {ch.kind}")
    out *= 1.0 - pi_j
    out[K] += pi_j
    return QuantizedDensity(out, step)


def variable_update(
    channel_density_by_degree: dict[int, QuantizedDensity],
    check_msg: QuantizedDensity,
    lam: DegreePolynomial,
) -> QuantizedDensity:
    """Mix over degrees i of channel(i) convolved with i-1 check messages."""
    if lam.perspective != EDGE:
        raise DomainError("variable_update expects the edge-perspective lambda")
    _check_grid(check_msg, *channel_density_by_degree.values())
    K = check_msg.K
    n = 2 * K + 1
    dmax = max(lam.degrees)
    N = sfft.next_fast_len(dmax * (n - 1) + 1, real=True)
    C = sfft.rfft(check_msg.masses, N)
    out = np.zeros(n)
    for d, w in lam.terms:
        r = sfft.irfft(sfft.rfft(channel_density_by_degree[d].masses, N) * C ** (d - 1), N)
        r = r[: d * (n - 1) + 1]
        ctr = d * K
        seg = r[ctr - K : ctr + K + 1].copy()
        # saturate at +-L
        seg[0] += r[: ctr - K].sum()
        seg[-1] += r[ctr + K + 1 :].sum()
        out += w * seg
    np.maximum(out, 0.0, out)
    return QuantizedDensity(out / out.sum(), check_msg.step)


def _phi(x):
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


@dataclass(frozen=True)
class _CheckTable:
    """Index table for the pairwise tanh rule on magnitudes 1..K.

    For magnitudes i <= j the rounded output is i whenever j >= i + B; only
    the band j < i + B needs an explicit entry ``T[i, j - i]``.
    """

    K: int
    B: int
    T: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)


@lru_cache(maxsize=4)
def _check_table(K: int, step: float) -> _CheckTable:
    i1 = np.arange(1, K + 1)
    phis = _phi(i1 * step)
    phis[-1] = 0.0  # saturated bin is infinitely reliable

    def rounded(i, j):
        with np.errstate(divide="ignore", over="ignore"):
            v = np.rint(_phi(phis[i - 1] + phis[j - 1]) / step)
        return np.minimum(np.nan_to_num(v, posinf=K), K).astype(np.int64)

    need = 0
    for r in range(1, K + 1):
        j = np.arange(r, K + 1)
        bad = np.nonzero(rounded(np.full_like(j, r), j) != r)[0]
        if bad.size:
            need = max(need, int(bad.max()) + 1)
    B = max(need, 1)
    i = i1[:, None]
    jm = i + np.arange(B)[None, :]
    valid = jm <= K
    T = np.where(valid, rounded(np.broadcast_to(i, jm.shape), np.minimum(jm, K)), 0)
    return _CheckTable(K, B, T, valid.astype(float))


def _pair(tab: _CheckTable, x, y):
    """Combine two messages given as (P, D, z): P = pos + neg, D = pos - neg
    over magnitudes 1..K and z the mass at zero."""
    K, B, T, valid = tab.K, tab.B, tab.T, tab.valid
    Px, Dx, zx = x
    Py, Dy, zy = y
    idx = np.arange(K)
    jj = np.minimum(idx[:, None] + np.arange(B)[None, :], K - 1)
    t = np.minimum(idx + B, K)
    flat = T.ravel()

    def bilinear(a, b):
        w = a[:, None] * b[jj]
        w2 = b[:, None] * a[jj]
        w2[:, 0] = 0.0
        w = (w + w2) * valid
        out = np.bincount(flat, w.ravel(), K + 1)
        sa = np.concatenate([np.cumsum(a[::-1])[::-1], [0.0]])
        sb = np.concatenate([np.cumsum(b[::-1])[::-1], [0.0]])
        out[1:] += a * sb[t] + b * sa[t]
        return out

    P = bilinear(Px, Py)
    D = bilinear(Dx, Dy)
    z = 1.0 - (1.0 - zx) * (1.0 - zy) + P[0]
    return P[1:], D[1:], z


def check_update(var_msg: QuantizedDensity, rho: DegreePolynomial) -> QuantizedDensity:
    """Mix over check degrees d of the tanh-rule combination of d-1 messages."""
    if rho.perspective != EDGE:
        raise DomainError("check_update expects the edge-perspective rho")
    K, step = var_msg.K, var_msg.step
    tab = _check_table(K, step)
    v = var_msg.masses
    pos, neg = v[K + 1 :], v[K - 1 :: -1]
    cache = {1: (pos + neg, pos - neg, float(v[K]))}

    def power(n):
        if n not in cache:
            h = n // 2
            cache[n] = _pair(tab, power(h), power(n - h))
        return cache[n]

    out = np.zeros(2 * K + 1)
    for d, w in rho.terms:
        if d < 2:
            raise DomainError("check degrees must be at least 2")
        P, D, z = power(d - 1)
        o = np.empty(2 * K + 1)
        o[K + 1 :] = 0.5 * (P + D)
        o[K - 1 :: -1] = 0.5 * (P - D)
        o[K] = z
        out += w * np.maximum(o, 0.0)
    return QuantizedDensity(out, step)


@dataclass(frozen=True)
class DERun:
    status: str
    iterations: int
    trace: tuple[float, ...]

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def final_error(self) -> float:
        return self.trace[-1]

    def trace_csv(self) -> str:
        """Per-iteration trace as CSV text (iteration, error_probability)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "error_probability"])
        for t, pe in enumerate(self.trace):
            w.writerow([t, repr(pe)])
        return buf.getvalue()


def channel_densities(e: EnsembleSpec, ch: ChannelModel, pattern: PuncturingPattern, cfg: DEConfig):
    pattern.check_support(e.lam)
    return {d: initial_density(ch, pattern.rate(d), cfg) for d in e.lam.degrees}


def run_de(
    e: EnsembleSpec,
    ch: ChannelModel,
    pattern: PuncturingPattern | None = None,
    cfg: DEConfig | None = None,
    callback=None,
) -> DERun:
    """Iterate density evolution until success, a plateau, or max_iters.

    The trace starts with the error probability of the channel mixture
    (iteration 0). ``callback(t, density)`` sees every variable-node output.
    """
    pattern = pattern or PuncturingPattern.none()
    cfg = cfg or DEConfig()
    chans = channel_densities(e, ch, pattern, cfg)
    v = QuantizedDensity(sum(w * chans[d].masses for d, w in e.lam.terms), cfg.step)
    trace = [error_probability(v)]
    window = cfg.plateau_window
    for t in range(1, cfg.max_iters + 1):
        v = variable_update(chans, check_update(v, e.rho), e.lam)
        pe = error_probability(v)
        trace.append(pe)
        if callback is not None:
            callback(t, v)
        if pe < cfg.target_error:
            return DERun(CONVERGED, t, tuple(trace))
        if t > window and trace[-1 - window] - pe < cfg.plateau_rel * pe:
            return DERun(PLATEAU, t, tuple(trace))
    return DERun(MAX_ITERS, cfg.max_iters, tuple(trace))


def bec_recursion(e: EnsembleSpec, eps: float, iters: int) -> np.ndarray:
    """Scalar BEC density evolution x_{t+1} = eps lambda(1 - rho(1 - x_t)), x_0 = eps."""
    x = np.empty(iters + 1)
    x[0] = eps
    for t in range(iters):
        x[t + 1] = eps * e.lam(1.0 - e.rho(1.0 - x[t]))
    return x


def bec_threshold(e: EnsembleSpec, tol: float = 1e-6, iters: int = 20000, target: float = 1e-12) -> float:
    """BEC threshold by bisection on the scalar recursion."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bec_recursion(e, mid, iters)[-1] < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def de_bec_threshold(e: EnsembleSpec, cfg: DEConfig | None = None, tol: float = 1e-4) -> float:
    """BEC threshold by bisection on the quantized DE (erasure projection)."""
    cfg = cfg or DEConfig()
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if run_de(e, ChannelModel.bec(mid), cfg=cfg).converged:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def de_threshold(
    e: EnsembleSpec,
    pattern: PuncturingPattern | None = None,
    cfg: DEConfig | None = None,
    tol_db: float = 1e-3,
    bracket_db: tuple[float, float] | None = None,
    max_widen: int = 8,
):
    """Smallest Eb/N0 (largest noise level) at which BIAWGN DE succeeds.

    Bisection runs on Eb/N0 in dB, computed with the punctured design rate.
    ``bracket_db`` is a starting guess ``(fail, succeed)``; it is widened
    by doubling its width until DE fails at the low end and succeeds at the
    high end. The result is the midpoint of the final bracket.
    """
    from .thresholds import ITERATIVE_DE, ThresholdResult, sigma_from_eb_n0

    pattern = pattern or PuncturingPattern.none()
    cfg = cfg or DEConfig()
    rate = punctured_design_rate(e, pattern)

    seen: dict[float, bool] = {}

    def ok(db):
        if db not in seen:
            ch = ChannelModel.biawgn(sigma_from_eb_n0(db, rate))
            seen[db] = run_de(e, ch, pattern, cfg).converged
        return seen[db]

    lo, hi = bracket_db if bracket_db is not None else (0.0, 1.0)
    if not lo < hi:
        raise DomainError("bracket must satisfy lo < hi")
    for _ in range(max_widen):
        width = hi - lo
        low_ok = ok(lo)
        if low_ok:
            hi, lo = lo, lo - width
            continue
        if not ok(hi):
            lo, hi = hi, hi + width
            continue
        break
    else:
        raise BracketError(f"no DE threshold bracket found near {lo:.3f}..{hi:.3f} dB")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    mid = 0.5 * (lo + hi)
    return ThresholdResult(mid, sigma_from_eb_n0(mid, rate), ITERATIVE_DE, hi - lo)
