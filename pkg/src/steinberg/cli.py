"""Command line entry point: run a named check or a whole suite.

    steinberg run flag-homology --n 2 --p 3
    steinberg run theorem15 --group C4 --n 2 --p 2 --max-degree 4
    steinberg suite quick --out report.json
    steinberg suite full --format markdown --threads 8

Exit code 0 iff every executed check passed.  The emitted report is
byte-stable across runs and thread counts; wall-clock timings are printed to
stderr only when --timings is given.
"""

from __future__ import annotations

import argparse
import sys

from .checks import (REGISTRY, reports_to_json, reports_to_markdown,
                     run_check, run_suite)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, help="the prime")
    parser.add_argument("--n", type=int, help="ambient dimension / target rank")
    parser.add_argument("--d", type=int, help="frame count / family rank")
    parser.add_argument("--i", type=int, help="first block size")
    parser.add_argument("--j", type=int, help="second block size")
    parser.add_argument("--k", type=int, help="third block size (associativity)")
    parser.add_argument("--group", type=str,
                        help="built-in group name or file:<cayley.json>")
    parser.add_argument("--max-degree", type=int, dest="max_degree",
                        help="grading truncation (default 4)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", type=str, help="write the report to this path")
    parser.add_argument("--format", choices=("json", "markdown"), default="json")
    parser.add_argument("--timings", action="store_true",
                        help="print per-check wall time to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinberg",
        description="exact verification suites for Steinberg idempotent "
                    "calculus, flag complex homology, and fixed-point "
                    "decompositions")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one named check")
    runp.add_argument("check", choices=sorted(REGISTRY))
    _add_common(runp)
    suitep = sub.add_parser("suite", help="run a named suite")
    suitep.add_argument("level", choices=("quick", "full"))
    _add_common(suitep)
    return parser


def _emit(reports, args) -> int:
    if args.format == "markdown":
        text = reports_to_markdown(reports)
    else:
        text = reports_to_json(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.timings:
        for r in reports:
            print(f"{r.check} {r.params}: {r.elapsed_ms} ms", file=sys.stderr)
    return 0 if all(r.status == "pass" for r in reports) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        params = {k: getattr(args, k) for k in
                  ("p", "n", "d", "i", "j", "k", "group", "max_degree")}
        report = run_check(args.check, params)
        return _emit([report], args)
    reports = run_suite(args.level, threads=args.threads)
    return _emit(reports, args)


if __name__ == "__main__":
    sys.exit(main())
