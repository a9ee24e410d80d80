"""Noise thresholds in Eb/N0 and the Table 1 threshold study.

For BIAWGN with unit-energy BPSK and code rate R, ``Eb/N0 = 1 / (2 R sigma^2)``.
Punctured codes use their punctured design rate here.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .channels import BEC, BIAWGN, BSC, KINDS, ChannelModel, binary_entropy, capacity
from .degree_distributions import EnsembleSpec
from .errors import BracketError, DomainError, NonMonotoneError
from .puncturing import PuncturingPattern, punctured_design_rate
from .rate_bounds import ip_rate_bound

CAPACITY_LIMIT = "capacity_limit"
ML_LOWER_BOUND = "ml_lower_bound"
ITERATIVE_DE = "iterative_de"

TOL_DB = 1e-3
CAPACITY_TOL = 1e-9
MONOTONE_PROBES = 8


@dataclass(frozen=True)
class ThresholdResult:
    """A threshold in Eb/N0 (BIAWGN only) and in the channel parameter.

    ``tolerance_db`` is the final bracket width in dB; for BEC and BSC
    searches ``eb_n0_db`` is None and ``tolerance_db`` holds the bracket
    width in the channel parameter instead.
    """

    eb_n0_db: float | None
    channel_param: float
    kind: str
    tolerance_db: float

    def to_json(self) -> dict:
        return {
            "eb_n0_db": self.eb_n0_db,
            "channel_param": self.channel_param,
            "kind": self.kind,
            "tolerance_db": self.tolerance_db,
        }


def _check_rate(rate: float) -> None:
    if not 0.0 < rate < 1.0:
        raise DomainError(f"rate {rate!r} outside (0, 1)")


def eb_n0_from_sigma(sigma: float, rate: float) -> float:
    """Eb/N0 in dB for BPSK at noise level sigma and code rate R."""
    if not sigma > 0.0:
        raise DomainError(f"sigma {sigma!r} must be positive")
    _check_rate(rate)
    return -10.0 * math.log10(2.0 * rate * sigma * sigma)


def sigma_from_eb_n0(eb_n0_db: float, rate: float) -> float:
    _check_rate(rate)
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (eb_n0_db / 10.0)))


def _family(family: str) -> str:
    if family not in KINDS:
        raise DomainError(f"unknown channel family {family!r}")
    return family


def capacity_limit_threshold(rate: float, family: str = BIAWGN) -> ThresholdResult:
    """Channel parameter (and Eb/N0 for BIAWGN) at which capacity equals ``rate``."""
    _check_rate(rate)
    family = _family(family)
    if family == BEC:
        return ThresholdResult(None, 1.0 - rate, CAPACITY_LIMIT, 0.0)
    if family == BSC:
        d = brentq(lambda x: 1.0 - binary_entropy(x) - rate, 0.0, 0.5, xtol=1e-15, rtol=1e-15)
        return ThresholdResult(None, d, CAPACITY_LIMIT, 1e-15)

    def f(db):
        return capacity(ChannelModel.biawgn(sigma_from_eb_n0(db, rate))).value - rate

    lo, hi = -2.0, 2.0
    for _ in range(40):
        if f(lo) < 0.0 < f(hi):
            break
        lo, hi = lo - 2.0, hi + 2.0
    else:
        raise BracketError(f"capacity never crosses rate {rate!r}")
    db = brentq(f, lo, hi, xtol=1e-9)
    if abs(f(db)) > CAPACITY_TOL:
        raise BracketError(f"capacity solve stalled: residual {f(db)!r}")
    return ThresholdResult(db, sigma_from_eb_n0(db, rate), CAPACITY_LIMIT, 1e-9)


def _bisect(holds, lo, hi, tol, what):
    """Shrink [lo, hi] with ``holds(lo)`` False and ``holds(hi)`` True."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def ml_threshold(
    e: EnsembleSpec,
    pattern: PuncturingPattern | None = None,
    family: str = BIAWGN,
    tol_db: float = TOL_DB,
    series_tol: float = 1e-10,
) -> ThresholdResult:
    """Least channel quality at which the rate bound admits the design rate.

    Below this point no code from the punctured ensemble can be decoded
    with vanishing error probability, even by an ML decoder. The search
    starts from the capacity limit (where the bound must fail) and moves
    toward better channels; the bound is checked to be monotone on
    the initial bracket.
    """
    pattern = pattern or PuncturingPattern.none()
    family = _family(family)
    rate = punctured_design_rate(e, pattern)
    cap = capacity_limit_threshold(rate, family)

    if family == BIAWGN:
        def channel(x):
            return ChannelModel.biawgn(sigma_from_eb_n0(x, rate))

        lo, step = cap.eb_n0_db, 20.0 * math.log10(1.5)
        hi, tol = lo + step, tol_db
    else:
        # parameter space: smaller epsilon/delta is a better channel
        def channel(x):
            return ChannelModel(family, -x)

        lo, step = -cap.channel_param, cap.channel_param / 2
        hi, tol = min(lo + step, 0.0), 1e-9

    def margin(x):
        return ip_rate_bound(e, channel(x), pattern, series_tol).value - rate

    def holds(x):
        return margin(x) >= 0.0

    if holds(lo):
        raise BracketError("rate bound already holds at the capacity limit")
    for _ in range(20):
        if holds(hi):
            break
        lo, hi = hi, hi + step
        if family != BIAWGN:
            hi = min(hi, 0.0)
    else:
        raise BracketError(f"rate bound never reaches the design rate {rate!r}")
    probes = [margin(x) for x in np.linspace(lo, hi, MONOTONE_PROBES + 2)[1:-1]]
    if any(b < a for a, b in zip(probes, probes[1:])):
        raise NonMonotoneError(f"rate bound is not monotone between {lo!r} and {hi!r}: {probes}")
    lo, hi = _bisect(holds, lo, hi, tol, "ML threshold")
    mid = 0.5 * (lo + hi)
    if family == BIAWGN:
        return ThresholdResult(mid, sigma_from_eb_n0(mid, rate), ML_LOWER_BOUND, hi - lo)
    return ThresholdResult(None, -mid, ML_LOWER_BOUND, hi - lo)


def fractional_gap(capacity_db: float, ml_db: float, it_db: float) -> float:
    """Share of the iterative-decoding gap to capacity that even ML decoding pays."""
    if not capacity_db <= ml_db <= it_db or it_db == capacity_db:
        raise DomainError(
            f"need capacity <= ML <= IT with IT > capacity, got {capacity_db}, {ml_db}, {it_db}"
        )
    return (ml_db - capacity_db) / (it_db - capacity_db)


# ---------------------------------------------------------------- Table 1


def _data(name: str):
    return json.loads(resources.files("ldpcbound").joinpath("data").joinpath(name).read_text())


def table1_ensemble() -> EnsembleSpec:
    return EnsembleSpec.from_json(_data("table1_ensemble.json"))


def table1_patterns() -> list[PuncturingPattern]:
    return [PuncturingPattern.from_json(r) for r in _data("table1_patterns.json")["rows"]]


def table1_reference() -> dict:
    """Published Table 1 columns, for comparison."""
    return _data("table1_reference.json")


@dataclass(frozen=True)
class Table1Row:
    pattern: PuncturingPattern
    design_rate: float
    capacity_db: ThresholdResult
    ml_db: ThresholdResult
    it_db: ThresholdResult | None

    @property
    def fractional_gap(self) -> float | None:
        if self.it_db is None:
            return None
        return fractional_gap(self.capacity_db.eb_n0_db, self.ml_db.eb_n0_db, self.it_db.eb_n0_db)

    @property
    def fractional_gap_error(self) -> float | None:
        """Worst change of the gap over the three bracket half-widths."""
        if self.it_db is None:
            return None
        base = self.fractional_gap
        worst = 0.0
        cols = (self.capacity_db, self.ml_db, self.it_db)
        for signs in np.ndindex(2, 2, 2):
            v = [c.eb_n0_db + (0.5 if s else -0.5) * c.tolerance_db for c, s in zip(cols, signs)]
            if v[2] > v[0]:
                worst = max(worst, abs((v[1] - v[0]) / (v[2] - v[0]) - base))
        return worst

    @property
    def tolerance_db(self) -> float:
        cols = [self.capacity_db, self.ml_db] + ([self.it_db] if self.it_db else [])
        return max(c.tolerance_db for c in cols)


def table1_row(
    e: EnsembleSpec,
    pattern: PuncturingPattern,
    tol_db: float = TOL_DB,
    de_cfg=None,
    include_it: bool = True,
) -> Table1Row:
    from .density_evolution import de_threshold

    rate = punctured_design_rate(e, pattern)
    cap = capacity_limit_threshold(rate, BIAWGN)
    ml = ml_threshold(e, pattern, BIAWGN, tol_db)
    it = None
    if include_it:
        # iterative decoding cannot beat ML decoding
        guess = (ml.eb_n0_db, ml.eb_n0_db + 0.5)
        it = de_threshold(e, pattern, de_cfg, tol_db, bracket_db=guess)
    return Table1Row(pattern, rate, cap, ml, it)


def _row_job(args):
    return table1_row(*args)


def worker_count() -> int:
    """Concurrency cap from LDPCBOUND_THREADS (default 1)."""
    raw = os.environ.get("LDPCBOUND_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"LDPCBOUND_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def table1(
    e: EnsembleSpec | None = None,
    patterns: list[PuncturingPattern] | None = None,
    tol_db: float = TOL_DB,
    de_cfg=None,
    include_it: bool = True,
    workers: int | None = None,
) -> list[Table1Row]:
    """All rows, in input order; rows run in parallel processes if workers > 1."""
    e = e or table1_ensemble()
    patterns = table1_patterns() if patterns is None else patterns
    jobs = [(e, p, tol_db, de_cfg, include_it) for p in patterns]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_row_job(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_job, jobs))


TABLE1_COLUMNS = (
    "pattern",
    "design_rate",
    "capacity_limit_db",
    "ml_lower_bound_db",
    "iterative_db",
    "fractional_gap_pct",
    "tolerance_db",
)


def _fmt(x, digits):
    return "" if x is None else f"{x:.{digits}f}"


def table1_cells(row: Table1Row) -> list[str]:
    gap = row.fractional_gap
    return [
        row.pattern.polynomial_str(),
        _fmt(row.design_rate, 3),
        _fmt(row.capacity_db.eb_n0_db, 3),
        _fmt(row.ml_db.eb_n0_db, 3),
        _fmt(row.it_db.eb_n0_db if row.it_db else None, 3),
        "" if gap is None else f">= {100 * gap:.1f}",
        f"{row.tolerance_db:.0e}",
    ]


def table1_csv(rows: list[Table1Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE1_COLUMNS)
    for r in rows:
        w.writerow(table1_cells(r))
    return buf.getvalue()


def table1_markdown(rows: list[Table1Row]) -> str:
    cells = [list(TABLE1_COLUMNS)] + [table1_cells(r) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(TABLE1_COLUMNS))]

    def line(c):
        return "| " + " | ".join(x.ljust(w) for x, w in zip(c, widths)) + " |"

    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([line(cells[0]), sep] + [line(c) for c in cells[1:]]) + "\n"


def _value(x: float | None, err: float | None) -> dict | None:
    return None if x is None else {"value": x, "error_bound": err}


def table1_json(rows: list[Table1Row]) -> list[dict]:
    out = []
    for r in rows:
        out.append(
            {
                "pattern": r.pattern.to_json()["pattern"],
                "design_rate": _value(r.design_rate, 0.0),
                "capacity_limit_db": _value(r.capacity_db.eb_n0_db, r.capacity_db.tolerance_db),
                "ml_lower_bound_db": _value(r.ml_db.eb_n0_db, r.ml_db.tolerance_db),
                "iterative_db": _value(r.it_db.eb_n0_db, r.it_db.tolerance_db) if r.it_db else None,
                "fractional_gap": _value(r.fractional_gap, r.fractional_gap_error),
                "tolerance_db": r.tolerance_db,
            }
        )
    return out
