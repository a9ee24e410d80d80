"""Command-line front end.

    ldpcbound bound-rate --ensemble E.json --channel CH.json [--pattern P.json | --alpha A --ppct P]
    ldpcbound bound-complexity --channel CH.json [--ensemble E.json ...] [--eps 0.1]
    ldpcbound threshold-capacity (--rate R | --ensemble E.json [--pattern P.json]) [--family biawgn]
    ldpcbound threshold-ml --ensemble E.json [--pattern P.json] [--family biawgn]
    ldpcbound threshold-it --ensemble E.json [--pattern P.json] [--trace out.csv]
    ldpcbound table1 [--no-it]

A channel file holds either one channel, e.g. ``{"kind": "biawgn", "sigma": 0.95}``,
or a parallel assignment ``{"channels": [{"p": .., "q": .., "channel": {..}}, ..]}``.
Exit status is 1 for bad input and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .channels import BIAWGN, KINDS, BoundResult, ChannelModel, ParallelAssignment
from .complexity_bounds import (
    complexity_lower_bound_at,
    decoding_complexity,
    ip_complexity_bound,
    parallel_complexity_bound,
    rp_complexity_bound,
)
from .degree_distributions import EnsembleSpec, design_rate
from .density_evolution import DEConfig, de_threshold, run_de
from .errors import InputError, NumericalError, SchemaError
from .puncturing import PuncturingPattern, punctured_design_rate
from .rate_bounds import SERIES_TOL, ip_rate_bound, parallel_rate_bound, rp_rate_bound
from .thresholds import (
    TOL_DB,
    capacity_limit_threshold,
    ml_threshold,
    table1,
    table1_csv,
    table1_ensemble,
    table1_json,
    table1_markdown,
    table1_patterns,
)

FORMATS = ("csv", "markdown", "json")


def _load(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {what} file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} file {path!r} is not valid JSON: {exc}") from None


def _ensemble(args, required=True) -> EnsembleSpec | None:
    if args.ensemble is None:
        if required:
            raise SchemaError("--ensemble is required for this command")
        return None
    return EnsembleSpec.from_json(_load(args.ensemble, "ensemble"))


def _pattern(args) -> PuncturingPattern | None:
    if args.pattern is None:
        return None
    return PuncturingPattern.from_json(_load(args.pattern, "pattern"))


def _channel(args):
    """A ChannelModel or a ParallelAssignment, depending on the file layout."""
    if args.channel is None:
        raise SchemaError("--channel is required for this command")
    doc = _load(args.channel, "channel")
    if isinstance(doc, dict) and "channels" in doc:
        return ParallelAssignment.from_json(doc)
    return ChannelModel.from_json(doc)


def _puncturing_mode(args) -> str:
    rp = args.alpha is not None or args.ppct is not None
    if rp and args.pattern is not None:
        raise SchemaError("give either --pattern or --alpha/--ppct, not both")
    if rp and (args.alpha is None or args.ppct is None):
        raise SchemaError("--alpha and --ppct go together")
    return "rp" if rp else ("ip" if args.pattern is not None else "plain")


def _de_config(args) -> DEConfig:
    base = DEConfig()
    return DEConfig(
        L=args.de_L if args.de_L is not None else base.L,
        step=args.de_step if args.de_step is not None else base.step,
        max_iters=args.de_iters if args.de_iters is not None else base.max_iters,
    )


# ---------------------------------------------------------------- rendering


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render_records(records: list[tuple[str, object, object]], fmt: str) -> str:
    """Render (quantity, value, error_bound) triples."""
    if fmt == "json":
        doc = {name: {"value": v, "error_bound": e} for name, v, e in records}
        return render_json(doc)
    rows = [[name, _cell(v), _cell(e)] for name, v, e in records]
    header = ["quantity", "value", "error_bound"]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(3)]
    line = lambda r: "| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |"  # noqa: E731
    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([line(header), sep] + [line(r) for r in rows]) + "\n"


def render_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _bound_records(name: str, b: BoundResult) -> list:
    out = [(name, b.value, b.error_bound)]
    if b.clamped:
        out.append(("gamma_argument_clamped", 1, None))
    return out


def _threshold_records(t) -> list:
    out = [("kind", t.kind, None)]
    if t.eb_n0_db is not None:
        out.append(("eb_n0_db", t.eb_n0_db, t.tolerance_db / 2))
        out.append(("channel_param", t.channel_param, None))
    else:
        out.append(("channel_param", t.channel_param, t.tolerance_db / 2))
    return out


# ---------------------------------------------------------------- commands


def cmd_bound_rate(args) -> list:
    ch = _channel(args)
    mode = _puncturing_mode(args)
    tol = args.series_tol
    if isinstance(ch, ParallelAssignment):
        if mode != "plain":
            raise SchemaError("puncturing options need a single channel, not an assignment")
        e = _ensemble(args)
        return _bound_records("rate_bound", parallel_rate_bound(ch, e.gamma, tol))
    e = _ensemble(args)
    records = []
    if mode == "rp":
        b = rp_rate_bound(e, ch, args.alpha, args.ppct, tol)
        rate = design_rate(e) / (1.0 - args.alpha * args.ppct)
    elif mode == "ip":
        pattern = _pattern(args)
        b = ip_rate_bound(e, ch, pattern, tol)
        rate = punctured_design_rate(e, pattern)
    else:
        b = parallel_rate_bound(ParallelAssignment.single(ch), e.gamma, tol)
        rate = design_rate(e)
    records += _bound_records("rate_bound", b)
    records.append(("design_rate", rate, 0.0))
    return records


def cmd_bound_complexity(args) -> list:
    ch = _channel(args)
    mode = _puncturing_mode(args)
    if isinstance(ch, ParallelAssignment):
        if mode != "plain":
            raise SchemaError("puncturing options need a single channel, not an assignment")
        b = parallel_complexity_bound(ch)
    elif mode == "rp":
        b = rp_complexity_bound(_ensemble(args), ch, args.alpha, args.ppct)
    elif mode == "ip":
        b = ip_complexity_bound(_ensemble(args), ch, _pattern(args))
    else:
        b = parallel_complexity_bound(ParallelAssignment.single(ch))
    records = [
        ("k1", b.k1, None),
        ("k2", b.k2, None),
        ("average_capacity", b.average_capacity, None),
        ("note", b.note, None),
    ]
    if args.eps is not None:
        records.append(("eps", args.eps, None))
        records.append(("complexity_lower_bound", complexity_lower_bound_at(b, args.eps), None))
    e = _ensemble(args, required=False)
    if e is not None:
        rate = design_rate(e)
        records.append(("design_rate", rate, None))
        records.append(("decoding_complexity", decoding_complexity(e), None))
    return records


def _rate_for(args) -> float:
    if args.rate is not None:
        if args.ensemble is not None:
            raise SchemaError("give either --rate or --ensemble, not both")
        return args.rate
    e = _ensemble(args)
    pattern = _pattern(args) or PuncturingPattern.none()
    return punctured_design_rate(e, pattern)


def cmd_threshold_capacity(args) -> list:
    rate = _rate_for(args)
    return [("rate", rate, None)] + _threshold_records(capacity_limit_threshold(rate, args.family))


def cmd_threshold_ml(args) -> list:
    e = _ensemble(args)
    pattern = _pattern(args) or PuncturingPattern.none()
    t = ml_threshold(e, pattern, args.family, args.tol_db, args.series_tol)
    return [("rate", punctured_design_rate(e, pattern), None)] + _threshold_records(t)


def cmd_threshold_it(args) -> list:
    if args.family != BIAWGN:
        raise SchemaError("threshold-it supports the biawgn family only")
    e = _ensemble(args)
    pattern = _pattern(args) or PuncturingPattern.none()
    cfg = _de_config(args)
    ml = ml_threshold(e, pattern, BIAWGN, args.tol_db, args.series_tol)
    t = de_threshold(e, pattern, cfg, args.tol_db, bracket_db=(ml.eb_n0_db, ml.eb_n0_db + 0.5))
    if args.trace:
        run = run_de(e, ChannelModel.biawgn(t.channel_param), pattern, cfg)
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            fh.write(run.trace_csv())
    return [("rate", punctured_design_rate(e, pattern), None)] + _threshold_records(t)


def cmd_table1(args) -> str:
    e = _ensemble(args, required=False) or table1_ensemble()
    if args.pattern is not None:
        doc = _load(args.pattern, "pattern")
        if not isinstance(doc, dict) or not isinstance(doc.get("rows"), list):
            raise SchemaError('table1 pattern file needs a "rows" list of pattern documents')
        patterns = [PuncturingPattern.from_json(r) for r in doc["rows"]]
    else:
        patterns = table1_patterns()
    cfg = _de_config(args)
    rows = table1(e, patterns, args.tol_db, cfg, include_it=not args.no_it)
    if args.format == "json":
        return render_json(table1_json(rows))
    if args.format == "csv":
        return table1_csv(rows)
    return table1_markdown(rows)


COMMANDS = {
    "bound-rate": cmd_bound_rate,
    "bound-complexity": cmd_bound_complexity,
    "threshold-capacity": cmd_threshold_capacity,
    "threshold-ml": cmd_threshold_ml,
    "threshold-it": cmd_threshold_it,
    "table1": cmd_table1,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldpcbound",
        description="Rate and complexity bounds for LDPC codes over parallel channels.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--ensemble", help="ensemble JSON: lambda and rho term lists")
    parser.add_argument("--channel", help="channel or parallel-assignment JSON")
    parser.add_argument("--pattern", help="puncturing pattern JSON (table1: {\"rows\": [...]})")
    parser.add_argument("--alpha", type=float, help="fraction of bits eligible for random puncturing")
    parser.add_argument("--ppct", type=float, help="random puncturing rate of the eligible bits")
    parser.add_argument("--rate", type=float, help="code rate for threshold-capacity")
    parser.add_argument("--family", choices=KINDS, default=BIAWGN)
    parser.add_argument("--eps", type=float, help="gap to capacity for bound-complexity")
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument("--tol-db", type=float, default=TOL_DB, dest="tol_db")
    parser.add_argument("--series-tol", type=float, default=SERIES_TOL, dest="series_tol")
    parser.add_argument("--de-L", type=float, dest="de_L")
    parser.add_argument("--de-step", type=float, dest="de_step")
    parser.add_argument("--de-iters", type=int, dest="de_iters")
    parser.add_argument("--trace", help="threshold-it: write the DE trace at the threshold as CSV")
    parser.add_argument("--no-it", action="store_true", help="table1: skip density evolution")
    parser.add_argument("--output", "-o", help="write the report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not (args.tol_db > 0 and math.isfinite(args.tol_db)):
            raise SchemaError("--tol-db must be positive")
        result = COMMANDS[args.command](args)
        text = result if isinstance(result, str) else render_records(result, args.format)
    except InputError as exc:
        print(f"ldpcbound: input error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"ldpcbound: numerical failure: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
