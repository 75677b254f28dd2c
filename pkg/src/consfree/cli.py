"""``consfree`` command line.

Exit codes: 0 on success, 1 when a check fails, a run runs out of fuel or a
difftest disagrees, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .analysis import check_cons_free, check_left_linear_trs, check_orthogonal, compute_B
from .encoding import BOTTOM, EncodingError, encode_term, encode_trs
from .engine import DEFAULT_FUEL, BSafetyViolation, FuelExhausted, normalize
from .harness import DEFAULT_FUEL_INTERP, DEFAULT_FUEL_ORACLE, GenParams, difftest
from .interpreter import (
    MalformedOutput,
    PreconditionFailure,
    build_Q,
    interpret_run,
    q_source,
    simulation_term,
)
from .syntax import ParseError, load_trs, parse_term, print_term, print_trs
from .terms import TermError, type_order


class UsageError(Exception):
    pass


def _load(path):
    try:
        return load_trs(path)
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from e


def cmd_check(args) -> int:
    trs = _load(args.file)
    reports = [check_cons_free(trs), check_left_linear_trs(trs), check_orthogonal(trs)]
    order = type_order(trs)
    if args.json:
        for r in reports:
            print(r.to_jsonl())
        print(json.dumps({"check": "type-order", "value": order}))
    else:
        for r in reports:
            print(r.render())
        print(f"type order: {order}")
    return 0 if all(r.passed for r in reports) else 1


def cmd_run(args) -> int:
    trs = _load(args.file)
    start = parse_term(args.term, trs)
    b = compute_B(start, trs) if args.assert_bsafe else None
    run = normalize(trs, start, args.fuel, b_check=b, trace=args.trace)
    if run.trace is not None:
        for step in run.trace:
            print(step.render())
    if run.exhausted:
        print(f"fuel exhausted after {run.steps} steps", file=sys.stderr)
        return 1
    print(print_term(run.term))
    return 0


def cmd_encode(args) -> int:
    trs = _load(args.file)
    if args.term is None:
        print(print_term(encode_trs(trs)))
    else:
        start = parse_term(args.term, trs)
        encode_term(start)  # rejects non-ground terms with a clear message
        print(print_term(simulation_term(trs, start)))
    return 0


def cmd_interpret(args) -> int:
    trs = _load(args.file)
    start = parse_term(args.term, trs)
    try:
        run = interpret_run(trs, start, args.fuel, assert_bsafe=args.assert_bsafe)
    except FuelExhausted as e:
        print(str(e), file=sys.stderr)
        return 1
    print("Bottom" if run.result is BOTTOM else print_term(run.result))
    if args.verbose:
        print(f"steps: {run.steps}", file=sys.stderr)
    return 0


def cmd_export_q(args) -> int:
    text = q_source() if args.annotated else print_trs(build_Q())
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return 0


def cmd_difftest(args) -> int:
    p = GenParams(args.seed, args.max_symbols, args.max_rules, args.max_depth, args.max_arity)
    report = difftest(
        p,
        args.cases,
        args.fuel_oracle,
        args.fuel_interp,
        include_golden=not args.no_golden,
        assert_bsafe=args.assert_bsafe,
        workers=args.workers,
    )
    text = report.render()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(text.splitlines()[-1] if not report.disagreements else text)
    else:
        sys.stdout.write(text)
    return 1 if report.disagreements else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="consfree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="cons-freeness, left-linearity, orthogonality, type order")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="one JSON document per line")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="normalise a term under the system")
    p.add_argument("file")
    p.add_argument("term")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--assert-bsafe", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("encode", help="print the encoded rules, or the interpreter call for TERM")
    p.add_argument("file")
    p.add_argument("term", nargs="?")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("interpret", help="normalise TERM through the interpreter")
    p.add_argument("file")
    p.add_argument("term")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--assert-bsafe", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("export-q", help="write the interpreter program as a .trs file")
    p.add_argument("out")
    p.add_argument("--annotated", action="store_true", help="keep comments and grouping")
    p.set_defaults(func=cmd_export_q)

    p = sub.add_parser("difftest", help="compare direct and interpreted runs")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--fuel-oracle", type=int, default=DEFAULT_FUEL_ORACLE)
    p.add_argument("--fuel-interp", type=int, default=DEFAULT_FUEL_INTERP)
    p.add_argument("--report")
    p.add_argument("--no-golden", action="store_true", help="skip the golden corpus")
    p.add_argument("--assert-bsafe", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    defaults = GenParams()
    p.add_argument("--max-symbols", type=int, default=defaults.max_symbols)
    p.add_argument("--max-rules", type=int, default=defaults.max_rules)
    p.add_argument("--max-depth", type=int, default=defaults.max_depth)
    p.add_argument("--max-arity", type=int, default=defaults.max_arity)
    p.set_defaults(func=cmd_difftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("fuel", "cases", "fuel_oracle", "fuel_interp"):
        if getattr(args, name, 1) < 1:
            parser.error(f"--{name.replace('_', '-')} must be positive")
    try:
        return args.func(args)
    except ParseError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return 2
    except (UsageError, PreconditionFailure, EncodingError, TermError, ValueError) as e:
        print(f"consfree: {e}", file=sys.stderr)
        return 2
    except (BSafetyViolation, MalformedOutput) as e:
        print(f"consfree: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
