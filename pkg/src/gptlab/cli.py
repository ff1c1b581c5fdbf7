"""Command-line front end.

Exit codes: 0 success, 1 golden-suite failure, 2 input error,
3 internal inconsistency. Verdicts are data and never change the exit code.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import GptlabError, InternalInconsistency
from .exact.rational import parse_rational
from .golden import run_golden
from .model import DEFAULT_EPS, classical_model, polygon_model
from .postulates import REPORT_SECTIONS, build_report, perfectly_distinguishable
from .randomgen import RandomPolytopeSpec, random_state_space
from .serialize import (
    distinguish_to_json,
    dumps,
    load_state_space,
    report_to_json,
    report_to_text,
    save_state_space,
)

EXIT_OK = 0
EXIT_GOLDEN = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _rational_arg(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        pass
    # Accept scientific shorthand such as 1e-9 exactly via the decimal text.
    from decimal import Decimal, InvalidOperation
    from fractions import Fraction

    try:
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


def _seed_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gptlab", description="Exact polytopic GPT toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a state-space model file")
    kinds = gen.add_subparsers(dest="kind", required=True)
    c = kinds.add_parser("classical")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--out", required=True)
    p = kinds.add_parser("polygon")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=_rational_arg, default=DEFAULT_EPS)
    p.add_argument("--out", required=True)
    r = kinds.add_parser("random")
    r.add_argument("--dim", type=int, required=True)
    r.add_argument("--vertices", type=int, required=True)
    r.add_argument("--seed", type=_seed_arg, required=True)
    r.add_argument("--denom", type=int, default=1)
    r.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="run postulate checks on a model file")
    rep.add_argument("--in", dest="input", required=True)
    rep.add_argument("--which", choices=("all",) + REPORT_SECTIONS, default="all")
    rep.add_argument("--format", choices=("json", "text"), default="json")

    dis = sub.add_parser("distinguish", help="test perfect distinguishability of vertex groups")
    dis.add_argument("--in", dest="input", required=True)
    dis.add_argument("--groups", required=True, help='1-based vertex indices, e.g. "1,2|3"')

    gold = sub.add_parser("golden", help="run the golden example suite")
    gold.add_argument("--corpus", default=None, help="directory with <model>.json overrides")
    return parser


def parse_groups(text: str, vertex_count: int) -> list[list[int]]:
    """Parse ``"1,2|3"`` into 0-based index groups."""
    groups = []
    for chunk in text.split("|"):
        items = [t.strip() for t in chunk.split(",") if t.strip()]
        if not items:
            raise GptlabError(f"empty group in {text!r}")
        group = []
        for t in items:
            if not t.isdigit():
                raise GptlabError(f"bad vertex index {t!r}")
            k = int(t)
            if not 1 <= k <= vertex_count:
                raise GptlabError(f"vertex index {k} outside 1..{vertex_count}")
            group.append(k - 1)
        groups.append(group)
    return groups


def _generate(args) -> int:
    if args.kind == "classical":
        space = classical_model(args.d)
    elif args.kind == "polygon":
        space = polygon_model(args.n, args.eps)
    else:
        space = random_state_space(RandomPolytopeSpec(args.dim, args.vertices, args.seed, args.denom))
    save_state_space(space, args.out)
    return EXIT_OK


def _report(args, out) -> int:
    space = load_state_space(args.input)
    report = build_report(space, args.which)
    if args.format == "json":
        out.write(dumps(report_to_json(space, report)))
    else:
        out.write(report_to_text(space, report))
    return EXIT_OK


def _distinguish(args, out) -> int:
    space = load_state_space(args.input)
    groups = parse_groups(args.groups, len(space.vertices))
    result = perfectly_distinguishable(space, groups)
    out.write(dumps(distinguish_to_json(space, groups, result)))
    return EXIT_OK


def _golden(args, out) -> int:
    if args.corpus is not None and not Path(args.corpus).is_dir():
        raise GptlabError(f"corpus directory {args.corpus} does not exist")
    results = run_golden(args.corpus)
    for r in results:
        out.write(r.line() + "\n")
    failed = sum(not r.passed for r in results)
    out.write(f"golden: {len(results) - failed} passed, {failed} failed\n")
    return EXIT_GOLDEN if failed else EXIT_OK


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "generate":
            return _generate(args)
        if args.command == "report":
            return _report(args, out)
        if args.command == "distinguish":
            return _distinguish(args, out)
        return _golden(args, out)
    except InternalInconsistency as exc:
        err.write(f"internal inconsistency: {exc}\n")
        if exc.dump:
            err.write(dumps(exc.dump))
        return EXIT_INTERNAL
    except GptlabError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())
