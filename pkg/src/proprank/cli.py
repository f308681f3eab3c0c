"""Command line interface: ``proprank {aggregate,check,curve,gen,reproduce}``."""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from proprank import axioms, baselines, profile_io
from proprank.errors import CapacityError, InconsistencyError, InvalidInputError
from proprank.reproduce import CASES, run_case
from proprank.rules import RULES, pair_scheme, rank_scheme

EXIT_OK, EXIT_PARSE, EXIT_CAPACITY, EXIT_PROPERTY, EXIT_INTERNAL = 0, 2, 3, 4, 5

EXIT_CODES_HELP = """\
exit codes:
  0  success
  2  parse error or invalid input
  3  capacity error (enumeration or subset cap exceeded)
  4  property or bound failure (check, curve, reproduce)
  5  internal inconsistency
"""

BASELINES = {
    "borda-seq": lambda p, cap: baselines.sequential_borda(p),
    "kemeny": baselines.kemeny,
    "sqkemeny": baselines.squared_kemeny,
    "cc": lambda p, cap: baselines.chamberlin_courant(p),
}
RULE_NAMES = (*BASELINES, *RULES)
DEFAULT_BOUND = {"psb": axioms.THM2_PSB, "rmes": axioms.THM4_RMES, "fb": axioms.THM6_FB}


def q(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    text = _read(path)
    return text, profile_io.parse_document(text)


def _run_rule(rule, profile, cap):
    """Return ``(ranking, trace or None, baseline result or None)``."""
    if rule in RULES:
        out, trace = RULES[rule](profile)
        return out, trace, None
    result = BASELINES[rule](profile, cap)
    return result.ranking, None, result


def _trace_report(profile, out, trace):
    """The rule's own payments checked condition by condition."""
    if trace.rule == "fb":
        return axioms.verify_pair_scheme(profile, out, pair_scheme(trace))
    return axioms.verify_rank_scheme(profile, out, rank_scheme(trace))


def _reports(profile, out, spjr_cap=axioms.SPJR_SUPPORT_CAP):
    reports = [
        axioms.check_ujr(profile, out),
        axioms.check_upjr(profile, out),
    ]
    if len(profile) <= spjr_cap:
        reports.append(axioms.check_spjr(profile, out, spjr_cap))
    reports += [
        axioms.verify_rank_priceability(profile, out),
        axioms.verify_pair_priceability(profile, out),
        axioms.check_pareto(profile, out),
    ]
    return reports


def _report_fields(report, tag, names):
    yield f"{tag}.{report.axiom}", "satisfied" if report.satisfied else "violated"
    if report.witness:
        for k, v in report.witness.items():
            yield f"{tag}.{report.axiom}.{k}", axioms.show_value(v, names)


def _record(rule, text, doc, out, trace, result, reports, scheme, elapsed):
    show = doc.show
    items = [
        ("rule", rule),
        ("input_sha256", profile_io.digest(text)),
        ("m", doc.m),
        ("candidates", " ".join(doc.names)),
    ]
    support = doc.profile.support()
    for k, r in enumerate(support, start=1):
        items.append((f"support.{k}", f"{q(doc.profile[r])} {show(r, '>')}"))
    items.append(("output", show(out, ">")))
    if result is not None:
        items += [("score", q(result.score)), ("tie_note", result.tie_note)]
    if trace is not None:
        for rec in trace.rounds:
            tag = f"round.{rec.index}"
            items += [
                (f"{tag}.chosen", doc.names[rec.chosen]),
                (f"{tag}.budgets", " ".join(q(rec.budgets[r]) for r in support)),
                (f"{tag}.payments", " ".join(q(rec.payments.get(r, 0)) for r in support)),
            ]
            if rec.price is not None:
                items.append((f"{tag}.price", q(rec.price)))
            if rec.flow_value is not None:
                items.append((f"{tag}.flow_value", q(rec.flow_value)))
            if rec.tied:
                items.append((f"{tag}.tied", True))
        items.append(("leftover", q(trace.leftover)))
    for report in reports:
        items += list(_report_fields(report, "check", doc.names))
    if scheme is not None:
        items += list(_report_fields(scheme, "trace", doc.names))
    if elapsed is not None:
        items.append(("timing_ms", f"{elapsed * 1000:.3f}"))
    return profile_io.render_record(items)


def _print_trace(doc, trace):
    support = doc.profile.support()
    print("rankings: " + "; ".join(f"r{k}={doc.show(r, '>')}" for k, r in enumerate(support, 1)))
    for rec in trace.rounds:
        line = f"round {rec.index}: {doc.names[rec.chosen]}"
        line += "  budgets " + " ".join(q(rec.budgets[r]) for r in support)
        if rec.payments:
            line += "  payments " + " ".join(q(rec.payments.get(r, 0)) for r in support)
        if rec.price is not None:
            line += f"  price {q(rec.price)}"
        if rec.flow_value is not None:
            line += f"  flow {q(rec.flow_value)}"
        print(line)
    print(f"leftover {q(trace.leftover)}")


# -- commands


def cmd_aggregate(args) -> int:
    text, doc = _load(args.profile)
    start = time.perf_counter()
    out, trace, result = _run_rule(args.rule, doc.profile, args.cap)
    elapsed = time.perf_counter() - start if args.timing else None
    print(doc.show(out))
    if result is not None and args.trace:
        print(f"score {q(result.score)}" + ("  (tied)" if result.tie_note else ""))
    if trace is not None and args.trace:
        _print_trace(doc, trace)
    reports = _reports(doc.profile, out) if args.check else []
    scheme = _trace_report(doc.profile, out, trace) if args.check and trace else None
    for report in reports:
        print(report.describe(doc.names))
    if scheme is not None:
        print("trace scheme " + scheme.describe(doc.names))
    if args.out:
        record = _record(args.rule, text, doc, out, trace, result, reports, scheme, elapsed)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(record)
    return EXIT_OK


def cmd_check(args) -> int:
    _, doc = _load(args.profile)
    out = profile_io.parse_order(args.ranking, doc.names)
    reports = _reports(doc.profile, out, spjr_cap=args.spjr_cap)
    for report in reports:
        print(report.describe(doc.names))
    return EXIT_OK if all(reports) else EXIT_PROPERTY


def _curve(profile, rule, bound):
    out, _ = RULES[rule](profile)
    return axioms.worst_group_margin(profile, out, bound)


def cmd_curve(args) -> int:
    bound = args.bound or DEFAULT_BOUND[args.rule]
    if args.profile:
        _, doc = _load(args.profile)
        curve = _curve(doc.profile, args.rule, bound)
        print("alpha_num,alpha_den,min_avg_utility,bound_value,margin")
        for p in curve.breakpoints:
            print(f"{p.alpha.numerator},{p.alpha.denominator},{q(p.min_avg_utility)},"
                  f"{q(p.bound_value)},{q(p.margin)}")
        worst = curve.min_margin
        print(f"min_margin,{q(worst)}")
        return EXIT_OK if worst >= 0 else EXIT_PROPERTY
    lo, hi = _seed_range(args.seeds)
    params = _model_params(args)

    def one(seed):
        profile = profile_io.gen_profile(args.model, args.m, args.support, seed, **params)
        return _curve(profile, args.rule, bound).min_margin

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        margins = list(pool.map(one, range(lo, hi)))
    print("seed,min_margin")
    for seed, margin in zip(range(lo, hi), margins):
        print(f"{seed},{q(margin)}")
    worst = min(margins)
    print(f"min_margin,{q(worst)}")
    return EXIT_OK if worst >= 0 else EXIT_PROPERTY


def _seed_range(spec: str):
    try:
        if ":" in spec:
            lo, hi = (int(s) for s in spec.split(":", 1))
        else:
            lo = int(spec)
            hi = lo + 1
    except ValueError:
        raise InvalidInputError(f"seeds must look like 'A:B' or 'A', got {spec!r}") from None
    if hi <= lo:
        raise InvalidInputError("empty seed range")
    return lo, hi


def _model_params(args):
    params = {}
    if args.phi is not None:
        params["phi"] = args.phi
    if args.split is not None:
        params["split"] = profile_io.parse_rational(args.split)
    if args.noise is not None:
        params["noise"] = profile_io.parse_rational(args.noise)
    return params


def cmd_gen(args) -> int:
    profile = profile_io.gen_profile(args.model, args.m, args.support, args.seed,
                                     **_model_params(args))
    text = profile_io.render_profile(profile)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cases = list(CASES) if args.case == "all" else [args.case]
    ok = True
    for case in cases:
        res = run_case(case)
        ok &= res.passed
        print(f"{case}: {'pass' if res.passed else 'FAIL'}")
        if args.verbose or not res.passed:
            for line in res.lines():
                print(line)
    return EXIT_OK if ok else EXIT_PROPERTY


# -- parser


def _add_model_args(p, required):
    p.add_argument("--model", choices=profile_io.MODELS, required=required, default=None)
    p.add_argument("--m", type=int, default=6, help="number of candidates (default 6)")
    p.add_argument("--support", type=int, default=5, help="rankings drawn (default 5)")
    p.add_argument("--phi", type=float, help="mallows dispersion in [0, 1]")
    p.add_argument("--split", help="two-bloc weight split, e.g. 3/5")
    p.add_argument("--noise", help="two-bloc noise mass, e.g. 1/8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proprank",
        description="Proportional rank aggregation with exact rational certificates.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("aggregate", help="run a rule on a profile file",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("profile", help="profile file ('-' for stdin)")
    p.add_argument("--rule", choices=RULE_NAMES, required=True)
    p.add_argument("--trace", action="store_true", help="print per-round budgets and payments")
    p.add_argument("--check", action="store_true", help="run every applicable axiom check")
    p.add_argument("--out", help="write a key=value run record to this file")
    p.add_argument("--cap", type=int, default=baselines.DEFAULT_ENUMERATION_CAP,
                   help="enumeration cap for kemeny/sqkemeny (default 8)")
    p.add_argument("--timing", action="store_true", help="include wall time in the record")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("check", help="check axioms for a given output ranking",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("profile")
    p.add_argument("--ranking", required=True, help="output ranking, e.g. 'x1 > x3 > x2'")
    p.add_argument("--spjr-cap", type=int, default=axioms.SPJR_SUPPORT_CAP,
                   help="largest support for the sPJR subset scan (default 16)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser(
        "curve", help="worst-group average utility against a proportionality bound (CSV)",
        description="With a profile file, prints one CSV row per breakpoint. With --model "
                    "and --seeds A:B, prints one seed,min_margin row per generated profile.",
        epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("profile", nargs="?")
    p.add_argument("--rule", choices=tuple(RULES), required=True)
    p.add_argument("--bound", choices=axioms.BOUNDS, help="default: the rule's own bound")
    _add_model_args(p, required=False)
    p.add_argument("--seeds", default="0:100", help="seed range A:B for generated profiles")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("gen", help="generate a seeded random profile",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_model_args(p, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reproduce", help="run a golden scenario",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("case", choices=(*CASES, "all"))
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "curve" and not args.profile and not args.model:
        parser.error("curve needs a profile file or --model")
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"proprank: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InvalidInputError as exc:
        print(f"proprank: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconsistencyError as exc:
        print(f"proprank: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
