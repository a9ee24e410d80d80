"""Degree distributions of LDPC ensembles.

A :class:`DegreePolynomial` stores ``(degree, coefficient)`` pairs where the
degree is always the *node* degree ``i``. In the edge perspective the term
contributes ``c_i x^(i-1)``; in the node perspective it contributes
``c_i x^i``. This matches the usual ``lambda_i`` / ``Lambda_i`` indexing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidDistributionError, InvalidEnsembleError, SchemaError

EDGE = "edge"
NODE = "node"
VARIABLE = "variable"
CHECK = "check"

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class DegreePolynomial:
    degrees: tuple[int, ...]
    coefficients: tuple[float, ...]
    perspective: str = EDGE
    side: str = VARIABLE

    def __post_init__(self):
        if self.perspective not in (EDGE, NODE):
            raise InvalidDistributionError(f"unknown perspective {self.perspective!r}")
        if self.side not in (VARIABLE, CHECK):
            raise InvalidDistributionError(f"unknown side {self.side!r}")
        if len(self.degrees) != len(self.coefficients):
            raise InvalidDistributionError("degrees and coefficients differ in length")
        if not self.degrees:
            raise InvalidDistributionError("empty degree distribution")
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise InvalidDistributionError("degrees must be strictly increasing")
        if self.degrees[0] < 1:
            raise InvalidDistributionError("degrees must be >= 1")
        if any(not c > 0 or not math.isfinite(c) for c in self.coefficients):
            raise InvalidDistributionError("coefficients must be positive and finite")

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[Sequence[float]],
        perspective: str = EDGE,
        side: str = VARIABLE,
    ) -> "DegreePolynomial":
        """Build from ``(degree, coefficient)`` pairs.

        Zero coefficients are dropped and the terms are sorted. The
        coefficients must sum to one within ``1e-12``; a sum inside that
        tolerance is renormalized exactly.
        """
        merged: dict[int, float] = {}
        for term in terms:
            try:
                deg, coef = term
            except (TypeError, ValueError):
                raise InvalidDistributionError(f"malformed term {term!r}") from None
            if int(deg) != deg:
                raise InvalidDistributionError(f"non-integer degree {deg!r}")
            deg = int(deg)
            coef = float(coef)
            if coef < 0 or not math.isfinite(coef):
                raise InvalidDistributionError(f"invalid coefficient {coef!r} at degree {deg}")
            if deg in merged:
                raise InvalidDistributionError(f"degree {deg} listed twice")
            merged[deg] = coef
        merged = {d: c for d, c in merged.items() if c > 0}
        total = math.fsum(merged.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(
                f"coefficients sum to {total!r}, not 1 within {NORMALIZATION_TOL}"
            )
        degrees = tuple(sorted(merged))
        coefficients = tuple(merged[d] / total for d in degrees)
        return cls(degrees, coefficients, perspective, side)

    @property
    def terms(self) -> list[tuple[int, float]]:
        return list(zip(self.degrees, self.coefficients))

    def coefficient(self, degree: int) -> float:
        try:
            return self.coefficients[self.degrees.index(degree)]
        except ValueError:
            return 0.0

    def exponents(self) -> np.ndarray:
        d = np.asarray(self.degrees, dtype=float)
        return d - 1 if self.perspective == EDGE else d

    def __call__(self, x):
        return evaluate(self, x)

    def to_json(self) -> list[list[float]]:
        return [[d, c] for d, c in self.terms]


def edge_to_node(d: DegreePolynomial) -> DegreePolynomial:
    if d.perspective != EDGE:
        raise DomainError("edge_to_node expects an edge-perspective distribution")
    w = [c / i for i, c in d.terms]
    total = math.fsum(w)
    return DegreePolynomial(d.degrees, tuple(x / total for x in w), NODE, d.side)


def node_to_edge(d: DegreePolynomial) -> DegreePolynomial:
    if d.perspective != NODE:
        raise DomainError("node_to_edge expects a node-perspective distribution")
    w = [c * i for i, c in d.terms]
    total = math.fsum(w)
    return DegreePolynomial(d.degrees, tuple(x / total for x in w), EDGE, d.side)


def evaluate(d: DegreePolynomial, x):
    """Evaluate the polynomial at ``x`` in [0, 1] (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > 1) or np.any(np.isnan(xa)):
        raise DomainError(f"argument outside [0, 1]: {x!r}")
    coef = np.asarray(d.coefficients)
    val = np.sum(coef * np.power.outer(xa, d.exponents()), axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def derivative_at_one(d: DegreePolynomial) -> float:
    """Largest slope of the polynomial on [0, 1]."""
    return float(np.dot(d.coefficients, d.exponents()))


def integral(d: DegreePolynomial) -> float:
    """Integral over [0, 1] of an edge-perspective polynomial."""
    if d.perspective != EDGE:
        raise DomainError("integral is defined for edge-perspective distributions")
    return math.fsum(c / i for i, c in d.terms)


@dataclass(frozen=True)
class EnsembleSpec:
    """The (lambda, rho) pair of an LDPC ensemble, both edge perspective."""

    lam: DegreePolynomial
    rho: DegreePolynomial

    def __post_init__(self):
        if self.lam.perspective != EDGE or self.rho.perspective != EDGE:
            raise InvalidEnsembleError("ensemble distributions must be edge perspective")
        if self.lam.side != VARIABLE or self.rho.side != CHECK:
            raise InvalidEnsembleError("lambda must be variable side, rho check side")
        r = 1.0 - integral(self.rho) / integral(self.lam)
        if not 0.0 < r < 1.0:
            raise InvalidEnsembleError(f"design rate {r!r} outside (0, 1)")

    @classmethod
    def from_terms(cls, lam_terms, rho_terms) -> "EnsembleSpec":
        return cls(
            DegreePolynomial.from_terms(lam_terms, EDGE, VARIABLE),
            DegreePolynomial.from_terms(rho_terms, EDGE, CHECK),
        )

    @classmethod
    def from_json(cls, doc) -> "EnsembleSpec":
        if not isinstance(doc, dict) or "lambda" not in doc or "rho" not in doc:
            raise SchemaError('ensemble document needs "lambda" and "rho" term lists')
        for key in ("lambda", "rho"):
            if not isinstance(doc[key], list):
                raise SchemaError(f'"{key}" must be a list of [degree, coefficient] pairs')
        return cls.from_terms(doc["lambda"], doc["rho"])

    def to_json(self) -> dict:
        return {"lambda": self.lam.to_json(), "rho": self.rho.to_json()}

    @property
    def lam_node(self) -> DegreePolynomial:
        return edge_to_node(self.lam)

    @property
    def gamma(self) -> DegreePolynomial:
        """Check degree distribution from the node perspective."""
        return edge_to_node(self.rho)


def design_rate(e: EnsembleSpec) -> float:
    r = 1.0 - integral(e.rho) / integral(e.lam)
    if not 0.0 < r < 1.0:
        raise InvalidEnsembleError(f"design rate {r!r} outside (0, 1)")
    return r


def average_right_degree(rho: DegreePolynomial) -> float:
    if rho.perspective != EDGE:
        raise DomainError("average_right_degree expects an edge-perspective rho")
    return 1.0 / integral(rho)
