"""Command-line front end: ``check``, ``gen`` and ``math``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench, oracle
from .explore import ERROR, LIMIT, SearchConfig, backward_reach, forward_reach
from .model import ModelError
from .region import render_region
from .textio import load_model, parse_pattern, parse_query, render_stats

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_LIMIT = 2

LOG_ENV = "REGIONREACH_LOG"


class UsageError(Exception):
    pass


def _read_arg(value: str) -> str:
    if value.startswith("@"):
        return Path(value[1:]).read_text(encoding="utf-8")
    return value


def _format_witness(witness) -> str:
    lines = []
    for label, item in witness:
        region = getattr(item, "region", item)
        extra = ""
        if getattr(item, "vars", ()):
            extra = " vars=" + ",".join(str(v) for v in item.vars)
        lines.append(f"  [{label}] {render_region(region)}{extra}")
    return "\n".join(lines)


def cmd_check(args, out) -> int:
    if args.pattern and args.query:
        raise UsageError("give either --query or --pattern, not both")
    if not args.pattern and not args.query:
        raise UsageError("one of --query or --pattern is required")
    direction = args.direction or ("backward" if args.pattern else "forward")
    if direction == "forward" and args.pattern:
        raise UsageError("--pattern needs --direction backward")
    if direction == "backward":
        if args.query:
            raise UsageError("backward search takes --pattern, not --query")
        if len(args.model) != 1:
            raise UsageError("backward search supports a single --model")
    cfg = SearchConfig(strategy=args.strategy, direction=direction,
                       max_regions=args.max_regions, max_millis=args.max_ms,
                       period_skip=args.period_skip, delay_first=args.delay_first)
    model = load_model(args.model)
    if direction == "forward":
        stats = forward_reach(model, parse_query(_read_arg(args.query), model), cfg)
    else:
        ta = model.components[0]
        stats = backward_reach(ta, parse_pattern(_read_arg(args.pattern), ta), cfg)
    print(render_stats(stats, args.stats), file=out)
    for d in stats.diagnostics:
        print(f"diagnostic: {d}", file=out)
    if args.witness and stats.witness:
        print("witness:", file=out)
        print(_format_witness(stats.witness), file=out)
    if stats.verdict == LIMIT:
        return EXIT_LIMIT
    if stats.verdict == ERROR:
        return EXIT_ERROR
    return EXIT_OK


def cmd_gen(args, out) -> int:
    try:
        b = bench.generate(args.family, args.size)
    except ValueError as err:
        raise UsageError(str(err)) from None
    target = Path(args.output)
    target.mkdir(parents=True, exist_ok=True)
    for name, text in b.sources().items():
        (target / name).write_text(text, encoding="utf-8")
        print(f"wrote {target / name}", file=out)
    (target / "query.txt").write_text(b.query + "\n", encoding="utf-8")
    print(f"query: {b.query}", file=out)
    return EXIT_OK


def cmd_math(args, out) -> int:
    try:
        if args.what == "fubini":
            value = oracle.fubini(args.n)
        elif args.what == "stirling2":
            if args.k is None:
                raise UsageError("stirling2 needs N and K")
            value = oracle.stirling2(args.n, args.k)
        else:
            if args.k is None:
                raise UsageError("lemma1 needs N and CM")
            value = oracle.lemma1_bound(args.n, args.k, literal=args.literal)
    except ValueError as err:
        raise UsageError(str(err)) from None
    print(value, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regionreach",
                                description="Region-based reachability for timed automata.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run a reachability query")
    c.add_argument("--model", action="append", required=True, metavar="FILE",
                   help="model file, one automaton each (repeatable)")
    c.add_argument("--query", metavar="Q", help="query text or @file")
    c.add_argument("--pattern", metavar="P", help="pattern file for backward search")
    c.add_argument("--strategy", choices=("dfs", "bfs"), default="dfs")
    c.add_argument("--direction", choices=("forward", "backward"))
    c.add_argument("--max-regions", type=int, metavar="N")
    c.add_argument("--max-ms", type=float, metavar="T")
    c.add_argument("--stats", choices=("text", "json"), default="text")
    c.add_argument("--delay-first", action="store_true",
                   help="DFS: expand the delay successor before discrete ones")
    c.add_argument("--period-skip", action="store_true",
                   help="backward: skip whole delay periods where sound")
    c.add_argument("--witness", action="store_true", help="print the witness trace")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="write a benchmark model")
    g.add_argument("family", choices=bench.FAMILIES)
    g.add_argument("size", type=int)
    g.add_argument("-o", "--output", default=".", metavar="DIR")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("math", help="print counting formula values")
    m.add_argument("what", choices=("fubini", "stirling2", "lemma1"))
    m.add_argument("n", type=int)
    m.add_argument("k", type=int, nargs="?")
    m.add_argument("--literal", action="store_true",
                   help="lemma1: choose bounded clocks among all n clocks (looser count)")
    m.set_defaults(func=cmd_math)
    return p


def _setup_logging():
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for limits here
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if args.command == "check" and args.pattern and not args.pattern.startswith("@"):
        # a bare pattern argument names a file
        args.pattern = "@" + args.pattern
    try:
        return args.func(args, out)
    except (UsageError, ModelError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
