"""Command-line entry point: `iacbv <subcommand> ...`.

Exit codes: 0 for success or equivalence, 1 for a negative verdict
(inequivalent terms, a distinguishing context found, an invalid play),
2 for errors (bad input, out of fuel).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import DEFAULT_N, interp, lang, oracle
from .canon import CanonError, canonicalize
from .games import denote_type, prearena_of_judgment
from .games import to_dot as arena_dot
from .games import to_text as arena_text
from .splays import parse_trace, validate_splay
from .syntax import ParseError, TypeError_, check_judgment, parse_term, parse_type, pretty, pretty_judgment
from .translate import TranslateError, check_ia2plus, decide_equiv, max_literal, translate

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _n(args) -> int:
    if args.n is not None:
        n = args.n
    else:
        env = os.environ.get("IACBV_N")
        try:
            n = int(env) if env else DEFAULT_N
        except ValueError:
            raise UsageError(f"IACBV_N must be an integer, got {env!r}")
    if n < 1:
        raise UsageError("N must be at least 1")
    return n


def _explicit_n(args) -> bool:
    return args.n is not None or bool(os.environ.get("IACBV_N"))


def _load(path: str):
    try:
        src = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    j = parse_term(src)
    ty = check_judgment(j)
    if j.ty is None:
        j = type(j)(j.ctx, j.term, ty)
    return j


def _machine(**fields) -> str:
    return "\t".join(f"{k}={v}" for k, v in fields.items())


# ---------------------------------------------------------------- subcommands


def cmd_eval(args) -> int:
    j = _load(args.file)
    if j.ctx:
        raise UsageError("eval needs a closed term")
    n = _n(args) if _explicit_n(args) else None
    r = interp.evaluate({}, j.term, args.fuel, n)
    if isinstance(r, interp.OutOfFuel):
        print(_machine(result="out-of-fuel", fuel=r.fuel_used) if args.format == "machine" else "out-of-fuel")
        return EXIT_ERROR
    if args.format == "machine":
        print(_machine(result="value", value=pretty(r.value), fuel=r.fuel_used))
    else:
        print(f"value {pretty(r.value)}")
    return EXIT_OK


def cmd_canon(args) -> int:
    j = _load(args.file)
    c = canonicalize(j.ctx, j.term)
    print(pretty_judgment(j.ctx, c, j.ty))
    return EXIT_OK


def cmd_arena(args) -> int:
    n = _n(args)
    if Path(args.what).exists():
        j = _load(args.what)
        ar = prearena_of_judgment(j.ctx, j.ty, n)
    else:
        ar = denote_type(parse_type(args.what), n)
    print(arena_text(ar) if args.format in ("text", "machine") else arena_dot(ar))
    return EXIT_OK


def cmd_translate(args) -> int:
    n = _n(args)
    j = _load(args.file)
    n = max(n, max_literal(j.term))
    check_ia2plus(j.ctx, j.term, n)
    c = canonicalize(j.ctx, j.term)
    cl = translate(j.ctx, c, j.ty, n)
    for k, (key, m) in enumerate(cl.components.items()):
        m = lang.minimize(m)
        if args.format == "dot":
            print(lang.to_dot(m, name=f"component{k}"))
        else:
            print(f"# component {cl.initial_name(key)}")
            print(lang.to_text(m))
    return EXIT_OK


def cmd_check(args) -> int:
    n = _n(args)
    j1, j2 = _load(args.first), _load(args.second)
    if tuple(j1.ctx) != tuple(j2.ctx):
        raise UsageError("the two judgments must have the same context")
    if j1.ty != j2.ty:
        raise UsageError(f"the two judgments have different types: {j1.ty} vs {j2.ty}")
    v = decide_equiv(j1, j2, n)
    if args.format == "machine":
        fields = {"verdict": "equivalent" if v.equivalent else "inequivalent", "n": v.n}
        if not v.equivalent:
            fields["witness"] = v.witness
            fields["side"] = v.accepted_by
        print(_machine(**fields))
    elif v.equivalent:
        print("EQUIVALENT")
    else:
        print(f"INEQUIVALENT witness {v.witness}")
    if args.find_context and not v.equivalent:
        w = oracle.distinguish(j1.ctx, j1.term, j2.term, j1.ty, args.max_context, args.fuel, v.n)
        if w is None:
            print("context none within budget")
        else:
            print(f"context {w}")
    return EXIT_OK if v.equivalent else EXIT_NO


def cmd_distinguish(args) -> int:
    n = _n(args)
    j1, j2 = _load(args.first), _load(args.second)
    if tuple(j1.ctx) != tuple(j2.ctx) or j1.ty != j2.ty:
        raise UsageError("the two judgments must share context and type")
    w = oracle.distinguish(j1.ctx, j1.term, j2.term, j1.ty, args.max_context, args.fuel, n)
    if w is None:
        print("none within budget")
        return EXIT_OK
    if args.format == "machine":
        print(_machine(context=str(w), converges=",".join(str(c).lower() for c in w.converges)))
    else:
        print(str(w))
    return EXIT_NO


def cmd_validate_play(args) -> int:
    n = _n(args)
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}")
    s = parse_trace(text, n=n)
    v = validate_splay(s, n)
    if v is None:
        print("valid S-play" if args.format != "machine" else _machine(valid="true", length=len(s.moves)))
        return EXIT_OK
    if args.format == "machine":
        print(_machine(valid="false", condition=v.condition, position=v.position))
    else:
        print(f"invalid: {v}")
    return EXIT_NO


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="bound on integers (default: IACBV_N or 2)")
    common.add_argument("--fuel", type=int, default=oracle.DEFAULT_FUEL, help="evaluation fuel")
    common.add_argument("--max-context", type=int, default=oracle.DEFAULT_MAX_SIZE,
                        help="largest context (AST nodes) tried by the oracle")
    common.add_argument("--format", choices=("text", "dot", "machine"), default="text")
    p = argparse.ArgumentParser(prog="iacbv", description="Equivalence checking for finitary call-by-value IA.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("eval", parents=[common], help="evaluate a closed term")
    s.add_argument("file")
    s.set_defaults(run=cmd_eval)
    s = sub.add_parser("canon", parents=[common], help="print the canonical form")
    s.add_argument("file")
    s.set_defaults(run=cmd_canon)
    s = sub.add_parser("arena", parents=[common], help="dump the arena of a type or judgment file")
    s.add_argument("what", help="a type such as 'com->exp', or a judgment file")
    s.set_defaults(run=cmd_arena)
    s = sub.add_parser("translate", parents=[common], help="print the automata of a judgment")
    s.add_argument("file")
    s.set_defaults(run=cmd_translate)
    s = sub.add_parser("check", parents=[common], help="decide equivalence of two judgments")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--find-context", action="store_true", help="also search for a distinguishing context")
    s.set_defaults(run=cmd_check)
    s = sub.add_parser("distinguish", parents=[common], help="search for a distinguishing context")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(run=cmd_distinguish)
    s = sub.add_parser("validate-play", parents=[common], help="check a play trace file")
    s.add_argument("file")
    s.set_defaults(run=cmd_validate_play)
    return p


def main(argv=None) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        return args.run(args)
    except (UsageError, ParseError, TypeError_, CanonError, TranslateError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
