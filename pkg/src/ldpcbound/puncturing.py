"""Puncturing patterns and their parallel-channel equivalents.

Puncturing a bit is the same as sending it through an erasure channel with
erasure probability one, so punctured transmission over one channel can be
rewritten as unpunctured transmission over several parallel channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import ChannelModel, ParallelAssignment
from .degree_distributions import NODE, DegreePolynomial, EnsembleSpec, integral
from .errors import DomainError, InvalidDistributionError, PatternMismatchError, SchemaError


@dataclass(frozen=True)
class PuncturingPattern:
    """Puncturing rate per variable-node degree (node-degree indexed)."""

    degrees: tuple[int, ...] = ()
    rates: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.degrees) != len(self.rates):
            raise InvalidDistributionError("degrees and rates differ in length")
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise InvalidDistributionError("pattern degrees must be strictly increasing")
        if any(d < 1 for d in self.degrees):
            raise InvalidDistributionError("pattern degrees must be >= 1")
        if any(not 0.0 <= r <= 1.0 for r in self.rates):
            raise InvalidDistributionError("puncturing rates must lie in [0, 1]")

    @classmethod
    def from_terms(cls, terms) -> "PuncturingPattern":
        rates: dict[int, float] = {}
        for term in terms:
            try:
                deg, rate = term
            except (TypeError, ValueError):
                raise InvalidDistributionError(f"malformed pattern term {term!r}") from None
            if int(deg) != deg or deg in rates:
                raise InvalidDistributionError(f"bad or repeated degree {deg!r}")
            rates[int(deg)] = float(rate)
        # a zero rate is the same as no entry
        kept = sorted(d for d, r in rates.items() if r != 0.0)
        return cls(tuple(kept), tuple(rates[d] for d in kept))

    @classmethod
    def none(cls) -> "PuncturingPattern":
        return cls()

    @classmethod
    def from_json(cls, doc) -> "PuncturingPattern":
        if not isinstance(doc, dict) or not isinstance(doc.get("pattern"), list):
            raise SchemaError('pattern document needs a "pattern" list of [degree, rate] pairs')
        return cls.from_terms(doc["pattern"])

    def to_json(self) -> dict:
        return {"pattern": [[d, r] for d, r in zip(self.degrees, self.rates)]}

    def rate(self, degree: int) -> float:
        try:
            return self.rates[self.degrees.index(degree)]
        except ValueError:
            return 0.0

    def polynomial_str(self) -> str:
        """Human-readable pattern polynomial, e.g. ``0.1x + 0.2x^9``."""
        if not self.degrees:
            return "0"
        parts = []
        for d, r in zip(self.degrees, self.rates):
            e = d - 1
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            parts.append(f"{r:g}{mono}")
        return " + ".join(parts)

    def check_support(self, lam: DegreePolynomial) -> None:
        missing = [d for d in self.degrees if lam.coefficient(d) == 0.0]
        if missing:
            raise PatternMismatchError(f"puncturing rates given for absent degrees {missing}")


def average_puncturing_rate(pattern: PuncturingPattern, lambda_node: DegreePolynomial) -> float:
    """Fraction of code bits punctured: sum of Lambda_j * pi_j."""
    if lambda_node.perspective != NODE:
        raise DomainError("average_puncturing_rate expects the node-perspective Lambda")
    pattern.check_support(lambda_node)
    return math.fsum(lambda_node.coefficient(d) * r for d, r in zip(pattern.degrees, pattern.rates))


def edge_puncturing_rate(pattern: PuncturingPattern, lam: DegreePolynomial) -> float:
    """Fraction of edges attached to punctured bits: sum of lambda_j * pi_j."""
    pattern.check_support(lam)
    return math.fsum(lam.coefficient(d) * r for d, r in zip(pattern.degrees, pattern.rates))


def punctured_design_rate(e: EnsembleSpec, pattern: PuncturingPattern) -> float:
    from .degree_distributions import design_rate

    p0 = average_puncturing_rate(pattern, e.lam_node)
    if p0 >= 1.0:
        raise DomainError("every code bit is punctured")
    return design_rate(e) / (1.0 - p0)


def _require_plain(ch: ChannelModel) -> None:
    if ch.erasure_prefix:
        raise DomainError("expected a channel without an erasure stage")


def ip_decomposition(e: EnsembleSpec, ch: ChannelModel, pattern: PuncturingPattern) -> ParallelAssignment:
    """One parallel channel per variable degree, erased at that degree's rate."""
    _require_plain(ch)
    pattern.check_support(e.lam)
    lam_node = e.lam_node
    entries = [
        (lam_node.coefficient(d), c, ch.with_prefix(pattern.rate(d)))
        for d, c in e.lam.terms
    ]
    return ParallelAssignment(tuple(entries))


def rp_xi(e: EnsembleSpec, alpha: float, p_pct: float) -> float:
    return 2.0 * (1.0 - alpha) * p_pct * integral(e.lam)


def rp_decomposition(e: EnsembleSpec, ch: ChannelModel, alpha: float, p_pct: float) -> ParallelAssignment:
    """Two-channel picture of random puncturing of a pre-selected bit subset.

    The selected fraction ``alpha`` of the bits goes through ``ch`` preceded
    by an erasure stage of rate ``p_pct``; the rest sees ``ch`` directly.
    The edge share of the selected subset is not fixed by ``alpha`` and
    lambda alone. It is set to ``1 - xi / p_pct`` so that the mixed moment
    equals ``(1 - p_pct + xi) g_p``, the worst case used by the random
    puncturing rate bound. This is a reconstruction, not a derived result.
    """
    _require_plain(ch)
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha {alpha!r} outside (0, 1]")
    if not 0.0 <= p_pct < 1.0:
        raise DomainError(f"puncturing rate {p_pct!r} outside [0, 1)")
    if p_pct == 0.0:
        q_sel = alpha
    else:
        q_sel = 1.0 - rp_xi(e, alpha, p_pct) / p_pct
    if not 0.0 < q_sel <= 1.0:
        raise DomainError(f"selected-edge fraction {q_sel!r} is not in (0, 1]")
    entries = [(alpha, q_sel, ch.with_prefix(p_pct))]
    if alpha < 1.0:
        if q_sel >= 1.0:
            raise DomainError("selected subset carries every edge but not every bit")
        entries.append((1.0 - alpha, 1.0 - q_sel, ch))
    return ParallelAssignment(tuple(entries))
