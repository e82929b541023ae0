#!/usr/bin/env python3
"""
dslice command line.

Usage:
    dslice alexander K946
    dslice cover K946 --q 3
    dslice check K --q 3 --d cochran-harvey-horn.json --mode doubly-vanishing
    dslice split "K + (-1)K_3" --q 3 --d cochran-harvey-horn.json
    dslice verify report.json

Exit codes: 0 success (whatever the verdict), 1 verify found a mismatch,
2 input error, 3 enumeration cap exceeded.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .covers import check_prime_power, prime_powers
from .errors import DsliceError, ErrorCode, GroupTooLargeError, NotPrimePowerError, create_error_response
from .files import KnotLibrary, load_sources
from .knots import KnotExpr, alexander, signed_leaves
from .laurent import cyclotomic_factors, format_cyclotomic_factors
from .linkform import metabolizer_pairs, metabolizers
from .logging_config import configure_logging, get_logger
from .obstruct import DSources, expression_cover, run_check, split_doubly_slice, verify
from .report import CheckKind, parse_verdict, poly_to_map, render, subgroup_data

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_CAP = 3

DEFAULT_Q_MAX = 3


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--knots", action="append", default=[], help="Additional knot file (repeatable)")
    parser.add_argument("--format", choices=["text", "json"], default="text", help="Output format")
    parser.add_argument("--cap", type=int, default=None, help="Largest group order to enumerate (verify defaults to the cap recorded in the report)")
    parser.add_argument("--sign", type=int, choices=[-1, 1], default=None, help="Linking form sign convention")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")


def _q_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=int, action="append", default=None, help="Cover degree (repeatable)")
    parser.add_argument(
        "--q-max", type=int, default=None, help=f"Every prime power up to this bound (default {DEFAULT_Q_MAX})"
    )
    parser.add_argument("--d", action="append", default=[], help="d-record file (repeatable)")
    parser.add_argument(
        "--lambda",
        dest="require_lambda",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Require Lambda-invariant metabolizers",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dslice", description="Correction-term obstructions to double sliceness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alexander", help="Normalized Alexander polynomial")
    p.add_argument("knot", help="Knot name or sum expression")
    _common(p)

    p = sub.add_parser("cover", help="H_1 of a branched cover with linking form and metabolizers")
    p.add_argument("knot")
    p.add_argument("--q", type=int, required=True, help="Cover degree (prime power)")
    p.add_argument(
        "--lambda", dest="require_lambda", action="store_true", help="Only count Lambda-invariant metabolizers"
    )
    _common(p)

    p = sub.add_parser("check", help="Slice or doubly slice obstruction for one knot")
    p.add_argument("knot")
    p.add_argument(
        "--mode",
        choices=[CheckKind.SLICE.value, CheckKind.DOUBLY_VANISHING.value, CheckKind.DOUBLY_SLICE.value],
        default=CheckKind.DOUBLY_VANISHING.value,
    )
    _q_options(p)
    _common(p)

    p = sub.add_parser("split", help="Coprime splitting obstruction for a connected sum")
    p.add_argument("expression", help='e.g. "K + (-1)K_3"')
    _q_options(p)
    _common(p)

    p = sub.add_parser("verify", help="Re-run a JSON report from its own data")
    p.add_argument("report", type=Path)
    _common(p)
    return parser


def _cover_degrees(args) -> List[int]:
    if args.q:
        for q in args.q:
            check_prime_power(q)
        return sorted(set(args.q))
    q_max = args.q_max if args.q_max is not None else DEFAULT_Q_MAX
    qs = list(prime_powers(q_max))
    if not qs:
        raise NotPrimePowerError(f"no prime power cover degree up to --q-max {q_max}")
    return qs


def _sources_for(args, expr: KnotExpr) -> DSources:
    sources = load_sources(args.d)
    names = {leaf.name for leaf, _ in signed_leaves(expr)}
    for name, q in sorted(key for key in sources if key[0] not in names):
        logger.warning(f"d-records for {name} at q={q} match no summand of the expression and are ignored")
    return sources


def _emit(text: str) -> None:
    print(text)


def cmd_alexander(args, library: KnotLibrary) -> int:
    delta = alexander(library.expression(args.knot))
    factors, rest = cyclotomic_factors(delta)
    determinant = abs(delta.evaluate(-1))
    if args.format == "json":
        payload = {
            "knot": args.knot,
            "alexander": poly_to_map(delta),
            "display": str(delta),
            "cyclotomic_factors": [[n, m] for n, m in factors],
            "cofactor": poly_to_map(rest),
            "determinant": str(determinant),
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2))
    else:
        _emit(str(delta))
        _emit(f"  factors: {format_cyclotomic_factors(delta)}")
        _emit(f"  |Delta(-1)|: {determinant}")
    return EXIT_OK


def cmd_cover(args, library: KnotLibrary) -> int:
    check_prime_power(args.q)
    H, _ = expression_cover(library.expression(args.knot), args.q, {}, args.sign)
    mets = metabolizers(H, args.require_lambda, args.cap)
    pairs = metabolizer_pairs(H, args.require_lambda, args.cap)
    if args.format == "json":
        payload = {
            "knot": args.knot,
            "q": args.q,
            "invariant_factors": list(H.invariant_factors),
            "gram": [[str(v) for v in row] for row in H.gram],
            "t_action": [list(row) for row in H.t_action],
            "metabolizers": [subgroup_data(P).model_dump() for P in mets],
            "pairs": len(pairs),
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2))
        return EXIT_OK

    _emit(f"{H.describe()}; metabolizers: {len(mets)}; pairs: {len(pairs)}")
    if H.rank:
        _emit("  linking form:")
        for row in H.gram:
            _emit("    " + "  ".join(str(v) for v in row))
        _emit("  deck action:")
        for row in H.t_action:
            _emit("    " + "  ".join(str(v) for v in row))
    for P in mets:
        _emit("  metabolizer <" + ", ".join(str(g) for g in P.generators) + ">")
    return EXIT_OK


def cmd_check(args, library: KnotLibrary) -> int:
    expr = library.expression(args.knot)
    sources = _sources_for(args, expr)
    verdict = run_check(
        CheckKind(args.mode),
        expr,
        args.knot,
        _cover_degrees(args),
        sources,
        args.require_lambda,
        args.cap,
        args.sign,
    )
    _emit(render(verdict, args.format))
    return EXIT_OK


def cmd_split(args, library: KnotLibrary) -> int:
    expr = library.expression(args.expression)
    sources = _sources_for(args, expr)
    verdict = split_doubly_slice(
        expr,
        _cover_degrees(args),
        sources,
        require_lambda=bool(args.require_lambda),
        cap=args.cap,
        sign=args.sign,
        knot=args.expression,
    )
    _emit(render(verdict, args.format))
    return EXIT_OK


def cmd_verify(args, library: KnotLibrary) -> int:
    try:
        verdict = parse_verdict(args.report.read_text(encoding="utf-8"))
    except (OSError, ValidationError, ValueError) as e:
        report_input_error(args, f"cannot read report {args.report}: {e}")
        return EXIT_INPUT
    expr = None
    if verdict.check is CheckKind.SPLIT:
        try:
            expr = library.expression(verdict.knot)
        except DsliceError as e:
            logger.warning(f"cannot re-parse {verdict.knot!r} ({e.message}); checking the stored summand classes")
    problems = verify(verdict, args.cap, expr)
    if args.format == "json":
        _emit(json.dumps({"verified": not problems, "problems": problems}, sort_keys=True, indent=2))
    elif problems:
        _emit("[MISMATCH]")
        for problem in problems:
            _emit(f"  - {problem}")
    else:
        _emit(f"[OK] {verdict.check.value} {verdict.knot}: {verdict.status.value} reproduced")
    return EXIT_MISMATCH if problems else EXIT_OK


def report_input_error(args, message: str, code: ErrorCode = ErrorCode.MALFORMED_RECORD) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(create_error_response(code, message, command=args.command), indent=2))
    else:
        print(f"Error: {message}", file=sys.stderr)


COMMANDS = {
    "alexander": cmd_alexander,
    "cover": cmd_cover,
    "check": cmd_check,
    "split": cmd_split,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(max(logging.DEBUG, logging.WARNING - 10 * args.verbose))
    try:
        library = KnotLibrary.load([Path(p) for p in args.knots])
        return COMMANDS[args.command](args, library)
    except GroupTooLargeError as e:
        _report_error(args, e)
        return EXIT_CAP
    except DsliceError as e:
        _report_error(args, e)
        return EXIT_INPUT
    except OSError as e:
        report_input_error(args, str(e))
        return EXIT_INPUT


def _report_error(args, error: DsliceError) -> None:
    if args.format == "json":
        print(json.dumps(error.to_response(args.command), indent=2))
        return
    print(f"Error [{error.code.value}]: {error.message}", file=sys.stderr)
    for detail in error.details:
        print(f"  - {detail.field}: {detail.message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
