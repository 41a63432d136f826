"""Command-line front end.

Subcommands: validate | infer | fta | report | to-bn.  Machine output
goes to stdout only, with tab-separated fixed-decimal fields so golden
files diff cleanly; diagnostics go to stderr.  Exit codes: 0 success,
1 validation/analysis findings, 2 usage error, 3 enumeration guard
exceeded.
"""

from __future__ import annotations

import argparse
import sys

from ucm.errors import (
    AnalysisError,
    GuardExceededError,
    ParseError,
    UnknownNameError,
)
from ucm.evidence import bel_pl_intervals, marginal_to_mass
from ucm.fta import evidential_top_event, ft_to_bn, minimal_cut_sets, top_event_probability
from ucm.inference import Query, posterior_marginal
from ucm.model import ModelDocument
from ucm.parser import parse_model, serialize_model
from ucm.taxonomy import decompose_marginal, recommend_means
from ucm.validation import validate

OK, FINDINGS, USAGE, GUARD = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, message: str | None = None):
        super().__init__(message or "")
        self.code = code
        self.message = message


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucm",
        description="Safety analysis over uncertainty-aware models: "
        "Bayesian networks with evidence-theoretic semantics plus fault trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a model file")
    p.add_argument("path")

    p = sub.add_parser("infer", help="posterior marginal of a variable")
    p.add_argument("path")
    p.add_argument("--query", required=True, metavar="NODE")
    p.add_argument(
        "--evidence", action="append", default=[], metavar="NODE=STATE",
        help="observed state; repeatable",
    )
    p.add_argument("--intervals", action="store_true",
                   help="also print belief/plausibility per atomic hypothesis")
    p.add_argument("--decimals", type=int, default=6, metavar="N")

    p = sub.add_parser("fta", help="fault-tree analysis of a top gate")
    p.add_argument("path")
    p.add_argument("--top", required=True, metavar="GATE")
    p.add_argument("--cutsets", action="store_true", help="print minimal cut sets")
    p.add_argument("--prob", action="store_true", help="print exact top-event probability")
    p.add_argument("--evidential", action="store_true", help="print [Bel, Pl] bounds")

    p = sub.add_parser("report", help="uncertainty decomposition and recommended means")
    p.add_argument("path")
    p.add_argument("--query", action="append", required=True, metavar="NODE")
    p.add_argument("--tau-e", type=float, default=0.05, metavar="X",
                   help="epistemic-mass threshold (default 0.05)")
    p.add_argument("--tau-o", type=float, default=0.01, metavar="X",
                   help="ontological-mass threshold (default 0.01)")
    p.add_argument("--decimals", type=int, default=6, metavar="N")

    p = sub.add_parser("to-bn", help="translate a fault tree into a Bayesian network")
    p.add_argument("path")
    p.add_argument("--top", required=True, metavar="GATE")

    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _Exit(USAGE, f"cannot read {path}: {exc.strerror}")


def _load_validated(path: str) -> ModelDocument:
    text = _read(path)
    try:
        doc = parse_model(text)
    except ParseError as exc:
        raise _Exit(FINDINGS, f"{path}: syntax error at {exc}")
    report = validate(doc)
    if not report.ok:
        raise _Exit(
            FINDINGS,
            f"{path}: model has {len(report.errors)} validation error(s); run: ucm validate {path}",
        )
    return doc


def _fmt(value: float, decimals: int) -> str:
    return f"{value:.{decimals}f}"


def cmd_validate(args) -> int:
    text = _read(args.path)
    try:
        doc = parse_model(text)
    except ParseError as exc:
        print(f"error\t{exc.line}:{exc.column}\t{exc.message}")
        return FINDINGS
    report = validate(doc)
    for finding in report:
        print(finding)
    if not report.ok:
        return FINDINGS
    print("OK")
    return OK


def _parse_evidence(pairs: list[str]) -> dict[str, str]:
    evidence = {}
    for pair in pairs:
        name, sep, state = pair.partition("=")
        if not sep or not name or not state:
            raise _Exit(USAGE, f"evidence must be NODE=STATE, got '{pair}'")
        evidence[name] = state
    return evidence


def cmd_infer(args) -> int:
    doc = _load_validated(args.path)
    query = Query(target=args.query, evidence=_parse_evidence(args.evidence))
    marginal = posterior_marginal(doc, query)
    for state, p in zip(marginal.states, marginal.probs):
        print(f"{state}\t{_fmt(p, args.decimals)}")
    if args.intervals:
        mass = marginal_to_mass(marginal, doc.variable(args.query))
        for hypothesis, bel, pl in bel_pl_intervals(mass):
            print(f"{hypothesis}\t{_fmt(bel, args.decimals)}\t{_fmt(pl, args.decimals)}")
    return OK


def cmd_fta(args) -> int:
    if not (args.cutsets or args.prob or args.evidential):
        raise _Exit(USAGE, "nothing to do: pass --cutsets, --prob, and/or --evidential")
    doc = _load_validated(args.path)
    if args.cutsets:
        for cs in minimal_cut_sets(doc, args.top):
            print("{" + ",".join(sorted(cs)) + "}")
    if args.prob:
        result = top_event_probability(doc, args.top)
        print(f"P(top)={_fmt(result.probability, 6)}")
        print(f"rare-event<={_fmt(result.rare_event_bound, 6)}")
    if args.evidential:
        result = evidential_top_event(doc, args.top)
        bel, pl = result.bel_pl
        print(f"[Bel,Pl]=[{_fmt(bel, 6)},{_fmt(pl, 6)}]")
    return OK


def cmd_report(args) -> int:
    doc = _load_validated(args.path)
    thresholds = (args.tau_e, args.tau_o)
    for target in args.query:
        node = doc.variable(target)
        marginal = posterior_marginal(doc, Query(target=target))
        print(f"node\t{target}")
        for state, p in zip(marginal.states, marginal.probs):
            print(f"{state}\t{_fmt(p, args.decimals)}")
        decomposition = decompose_marginal(marginal, node)
        print(f"ontological_mass\t{_fmt(decomposition.ontological_mass, args.decimals)}")
        print(f"epistemic_mass\t{_fmt(decomposition.epistemic_mass, args.decimals)}")
        print(f"aleatory_entropy_bits\t{_fmt(decomposition.aleatory_entropy_bits, args.decimals)}")
        for rec in recommend_means(decomposition, thresholds):
            print(f"means\t{rec.mean.value}\t{rec.trigger}\t{rec.message}")
    return OK


def cmd_to_bn(args) -> int:
    doc = _load_validated(args.path)
    sys.stdout.write(serialize_model(ft_to_bn(doc, args.top)))
    return OK


_HANDLERS = {
    "validate": cmd_validate,
    "infer": cmd_infer,
    "fta": cmd_fta,
    "report": cmd_report,
    "to-bn": cmd_to_bn,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return _HANDLERS[args.command](args)
    except _Exit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code
    except UnknownNameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return GUARD
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FINDINGS


if __name__ == "__main__":
    sys.exit(main())
