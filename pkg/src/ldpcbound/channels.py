"""Memoryless binary-input output-symmetric channels.

Each :class:`ChannelModel` may be preceded by an erasure stage with
probability ``erasure_prefix``: with that probability the receiver sees an
LLR of exactly zero (this is how a punctured bit looks to the decoder).

LLR densities are conditioned on the input ``+1`` (code bit 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .errors import InvalidChannelError, SchemaError

BEC = "bec"
BSC = "bsc"
BIAWGN = "biawgn"
KINDS = (BEC, BSC, BIAWGN)

_PARAM_NAMES = {BEC: "epsilon", BSC: "delta", BIAWGN: "sigma"}

# Quadrature window is mean +/- TAIL_SIGMAS standard deviations of the LLR.
TAIL_SIGMAS = 40.0


@dataclass(frozen=True)
class BoundResult:
    """A numerically computed quantity with a bound on its absolute error."""

    value: float
    error_bound: float = 0.0
    clamped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_bound", float(self.error_bound))
        object.__setattr__(self, "clamped", bool(self.clamped))

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        out = {"value": self.value, "error_bound": self.error_bound}
        if self.clamped:
            out["clamped"] = True
        return out


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    param: float
    erasure_prefix: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidChannelError(f"unknown channel kind {self.kind!r}")
        p, pi = float(self.param), float(self.erasure_prefix)
        if not 0.0 <= pi <= 1.0:
            raise InvalidChannelError(f"erasure_prefix {pi!r} outside [0, 1]")
        if self.kind == BEC:
            if not 0.0 <= p < 1.0:
                raise InvalidChannelError(f"BEC erasure probability {p!r} outside [0, 1)")
            if pi > 0.0:
                # two erasure stages collapse into one
                p, pi = pi + (1.0 - pi) * p, 0.0
        elif self.kind == BSC:
            if not 0.0 <= p < 0.5:
                raise InvalidChannelError(f"BSC crossover {p!r} outside [0, 0.5)")
        elif not (p > 0.0 and math.isfinite(p)):
            raise InvalidChannelError(f"BIAWGN sigma {p!r} must be positive")
        object.__setattr__(self, "param", p)
        object.__setattr__(self, "erasure_prefix", pi)

    @classmethod
    def bec(cls, epsilon: float, erasure_prefix: float = 0.0) -> "ChannelModel":
        return cls(BEC, epsilon, erasure_prefix)

    @classmethod
    def bsc(cls, delta: float, erasure_prefix: float = 0.0) -> "ChannelModel":
        return cls(BSC, delta, erasure_prefix)

    @classmethod
    def biawgn(cls, sigma: float, erasure_prefix: float = 0.0) -> "ChannelModel":
        return cls(BIAWGN, sigma, erasure_prefix)

    @classmethod
    def from_json(cls, doc) -> "ChannelModel":
        if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
            raise SchemaError(f'channel document needs "kind" in {KINDS}')
        name = _PARAM_NAMES[doc["kind"]]
        if name not in doc:
            raise SchemaError(f'{doc["kind"]} channel needs "{name}"')
        try:
            return cls(doc["kind"], float(doc[name]), float(doc.get("erasure_prefix", 0.0)))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidChannelError):
                raise
            raise SchemaError(f"channel parameters must be numbers: {doc!r}") from None

    def to_json(self) -> dict:
        out = {"kind": self.kind, _PARAM_NAMES[self.kind]: self.param}
        if self.erasure_prefix:
            out["erasure_prefix"] = self.erasure_prefix
        return out

    @property
    def plain(self) -> "ChannelModel":
        """The same channel without the erasure stage."""
        if self.erasure_prefix == 0.0:
            return self
        return ChannelModel(self.kind, self.param)

    def with_prefix(self, pi: float) -> "ChannelModel":
        if self.erasure_prefix:
            raise InvalidChannelError("channel already carries an erasure stage")
        return ChannelModel(self.kind, self.param, pi)

    @property
    def llr_mean(self) -> float:
        """Mean of the Gaussian LLR for BIAWGN."""
        return 2.0 / self.param**2

    @property
    def llr_std(self) -> float:
        return 2.0 / self.param


@dataclass(frozen=True)
class ParallelAssignment:
    """How code bits (``p``) and edges (``q``) split across parallel channels."""

    entries: tuple[tuple[float, float, ChannelModel], ...]

    def __post_init__(self):
        entries = tuple((float(p), float(q), ch) for p, q, ch in self.entries)
        if not entries:
            raise InvalidChannelError("empty parallel assignment")
        for p, q, ch in entries:
            if not (0.0 < p <= 1.0 and 0.0 < q <= 1.0):
                raise InvalidChannelError(f"fractions must lie in (0, 1], got p={p}, q={q}")
            if not isinstance(ch, ChannelModel):
                raise InvalidChannelError(f"not a channel: {ch!r}")
        if abs(math.fsum(e[0] for e in entries) - 1.0) > 1e-10:
            raise InvalidChannelError("bit fractions p_j must sum to 1")
        if abs(math.fsum(e[1] for e in entries) - 1.0) > 1e-10:
            raise InvalidChannelError("edge fractions q_j must sum to 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def single(cls, ch: ChannelModel) -> "ParallelAssignment":
        return cls(((1.0, 1.0, ch),))

    @classmethod
    def from_json(cls, doc) -> "ParallelAssignment":
        if not isinstance(doc, dict) or not isinstance(doc.get("channels"), list):
            raise SchemaError('assignment document needs a "channels" list')
        entries = []
        for item in doc["channels"]:
            if not isinstance(item, dict) or "p" not in item or "q" not in item:
                raise SchemaError('each assignment entry needs "p", "q" and "channel"')
            entries.append((item["p"], item["q"], ChannelModel.from_json(item.get("channel"))))
        return cls(tuple(entries))

    def to_json(self) -> dict:
        return {"channels": [{"p": p, "q": q, "channel": ch.to_json()} for p, q, ch in self.entries]}

    @property
    def p(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries])

    @property
    def q(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries])

    @property
    def channels(self) -> list[ChannelModel]:
        return [e[2] for e in self.entries]

    def __len__(self):
        return len(self.entries)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _gauss_window(ch: ChannelModel) -> tuple[float, float, float]:
    mu, s = ch.llr_mean, ch.llr_std
    return mu, s, mu + TAIL_SIGMAS * s


@lru_cache(maxsize=4096)
def _biawgn_capacity(sigma: float) -> tuple[float, float]:
    ch = ChannelModel.biawgn(sigma)
    mu, s, hi = _gauss_window(ch)
    lo = mu - TAIL_SIGMAS * s

    scale = 1.0 / (s * math.sqrt(2.0 * math.pi) * math.log(2.0))

    def loss(l):
        z = (l - mu) / s
        return scale * math.exp(-0.5 * z * z) * np.logaddexp(0.0, -l)

    val, err = integrate.quad(loss, lo, hi, points=[mu], epsabs=1e-14, epsrel=1e-13, limit=400)
    # log2(1+e^-l) <= 1 above the window and <= 1 - l/ln2 below it
    z = (lo - mu) / s
    lower_tail = norm.cdf(z) + max(0.0, s * norm.pdf(z) - mu * norm.cdf(z)) / math.log(2.0)
    upper_tail = norm.sf(TAIL_SIGMAS)
    return 1.0 - val, err + lower_tail + upper_tail


def capacity(ch: ChannelModel) -> BoundResult:
    """Capacity in bits per channel use, scaled by the non-erased fraction."""
    keep = 1.0 - ch.erasure_prefix
    if ch.kind == BEC:
        return BoundResult(keep * (1.0 - ch.param), 0.0)
    if ch.kind == BSC:
        return BoundResult(keep * (1.0 - binary_entropy(ch.param)), 1e-16)
    val, err = _biawgn_capacity(ch.param)
    return BoundResult(keep * val, keep * err)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
# nodes whose integrand bound is below this are dropped; the dropped mass is
# added to the error bound
_NEGLIGIBLE = 1e-30


def _panel_rule(lo: float, hi: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    n = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


@lru_cache(maxsize=512)
def _biawgn_g_rule(sigma: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Quadrature rule for the g_p integrals on [0, mean + 40 std].

    Returns (log tanh^2(l/2) at the nodes, folded weights, error bound).
    The rule is composite Gauss-Legendre; panels are halved until the
    probe moments agree with the refined rule to 1e-13.
    """
    ch = ChannelModel.biawgn(sigma)
    mu, s, hi = _gauss_window(ch)
    probe = 2.0 ** np.array([0, 1, 4, 8, 12, 16, 20, 30, 40, 50])

    def build(width):
        x, w = _panel_rule(0.0, hi, width)
        weight = w * (norm.pdf(x, mu, s) + norm.pdf(-x, mu, s))
        # log tanh(x/2) = -log1p(2 / expm1(x)), accurate as tanh -> 1
        logt2 = -2.0 * np.log1p(2.0 / np.expm1(x))
        return logt2, weight

    def moments(rule):
        logt2, weight = rule
        return np.exp(np.outer(probe, logt2)) @ weight

    width = min(1.0, s)
    rule = build(width)
    for _ in range(6):
        finer = build(width / 2.0)
        diff = float(np.max(np.abs(moments(rule) - moments(finer))))
        rule, width = finer, width / 2.0
        if diff < 1e-13:
            break
    logt2, weight = rule
    keep = weight > _NEGLIGIBLE * width
    dropped = float(np.sum(weight[~keep]))
    err = diff + dropped + 2.0 * norm.sf(TAIL_SIGMAS)
    logt2, weight = logt2[keep], weight[keep]
    logt2.setflags(write=False)
    weight.setflags(write=False)
    return logt2, weight, err


def _biawgn_g(sigma: float, p: np.ndarray) -> np.ndarray:
    """g_p at the given indices, computed block-wise to bound memory."""
    logt2, weight, _ = _biawgn_g_rule(sigma)
    out = np.empty(p.size)
    step = max(1, 2_000_000 // max(1, logt2.size))
    for a in range(0, p.size, step):
        b = min(p.size, a + step)
        out[a:b] = np.exp(np.outer(p[a:b], logt2)) @ weight
    return out


def g_moments_at(ch: ChannelModel, p) -> tuple[np.ndarray, float]:
    """g_p at increasing positive indices ``p`` and one error bound for all.

    g_p is the integral over l > 0 of a(l) (1 + e^-l) tanh^(2p)(l/2); indices
    up to 2^50 are supported.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or p[0] < 1 or np.any(np.diff(p) <= 0):
        raise ValueError("moment indices must be a nonempty increasing sequence >= 1")
    keep = 1.0 - ch.erasure_prefix
    if ch.kind == BEC:
        return np.full(p.size, keep * (1.0 - ch.param)), 0.0
    if ch.kind == BSC:
        return keep * (1.0 - 2.0 * ch.param) ** (2.0 * p), 1e-16
    vals = _biawgn_g(ch.param, p)
    err = _biawgn_g_rule(ch.param)[2]
    # the exact sequence is nonincreasing in p; enforce it against quadrature noise
    vals = np.minimum.accumulate(np.clip(vals, 0.0, 1.0))
    return keep * vals, keep * err


def g_moments(ch: ChannelModel, n: int) -> tuple[np.ndarray, float]:
    """Values of g_p for p = 1..n and one error bound covering all of them."""
    if n < 1:
        raise ValueError("need at least one moment")
    return g_moments_at(ch, np.arange(1, n + 1))


def g_moment(ch: ChannelModel, p: int) -> BoundResult:
    if int(p) != p or p < 1:
        raise ValueError(f"moment index must be a positive integer, got {p!r}")
    vals, err = g_moments_at(ch, [float(p)])
    return BoundResult(float(vals[0]), err)


def g_limit(ch: ChannelModel) -> float:
    """Limit of g_p as p grows: the probability mass of an infinite LLR."""
    keep = 1.0 - ch.erasure_prefix
    if ch.kind == BEC:
        return keep * (1.0 - ch.param)
    if ch.kind == BSC and ch.param == 0.0:
        return keep
    return 0.0


@dataclass(frozen=True)
class LLRDensity:
    """Continuous density value at a point plus the point masses."""

    density: float
    masses: tuple[tuple[float, float], ...] = field(default_factory=tuple)


def llr_density(ch: ChannelModel, l: float) -> LLRDensity:
    keep = 1.0 - ch.erasure_prefix
    masses: list[tuple[float, float]] = []
    dens = 0.0
    if ch.kind == BEC:
        masses = [(math.inf, 1.0 - ch.param), (0.0, ch.param)]
    elif ch.kind == BSC:
        d = ch.param
        if d == 0.0:
            masses = [(math.inf, keep)]
        else:
            m = math.log((1.0 - d) / d)
            masses = [(m, keep * (1.0 - d)), (-m, keep * d)]
        if ch.erasure_prefix:
            masses.append((0.0, ch.erasure_prefix))
    else:
        dens = keep * float(norm.pdf(l, ch.llr_mean, ch.llr_std))
        if ch.erasure_prefix:
            masses.append((0.0, ch.erasure_prefix))
    return LLRDensity(dens, tuple((loc, w) for loc, w in masses if w > 0.0))


def average_capacity(assign: ParallelAssignment) -> BoundResult:
    vals = [capacity(ch) for ch in assign.channels]
    p = assign.p
    return BoundResult(
        math.fsum(pj * c.value for pj, c in zip(p, vals)),
        math.fsum(pj * c.error_bound for pj, c in zip(p, vals)),
    )


def mixed_moments(weighted: Sequence[tuple[float, ChannelModel]], n: int) -> tuple[np.ndarray, float, float]:
    """Sum_j w_j g_{j,p} for p = 1..n, its error bound, and its p -> inf limit."""
    return mixed_moments_at(weighted, np.arange(1, n + 1))


def mixed_moments_at(weighted: Sequence[tuple[float, ChannelModel]], p) -> tuple[np.ndarray, float, float]:
    """As :func:`mixed_moments` at arbitrary increasing indices."""
    p = np.asarray(p, dtype=float)
    total = np.zeros(p.size)
    err = 0.0
    limit = 0.0
    for w, ch in weighted:
        g, e = g_moments_at(ch, p)
        total += w * g
        err += w * e
        limit += w * g_limit(ch)
    return total, err, limit
