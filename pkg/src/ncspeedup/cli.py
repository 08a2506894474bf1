"""Command-line front end.

Exit codes are shared by every subcommand: 0 for success or an affirmative
verdict, 1 for a negative verdict, 2 for usage, parse or limit errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from .analysis import SizeLimitError, is_perfect
from .conflict_graph import (
    ConflictGraph,
    build_kn_graph,
    export_dot,
    graph_from_obj,
    graph_to_obj,
    pattern_graph,
)
from .kn_bounds import bound_report
from .rational import DimensionLimitError, format_rational
from .speedup import class_min_speedup, imperfection_ratio_exact, pattern_speedup
from .traffic import PatternFormatError, TrafficError, full_structure, parse_pattern

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

CONJECTURED = Fraction(5, 4)
# 2xN sweeps beyond this N need --allow-long
LONG_N = 4


class UsageError(Exception):
    pass


def _read_input(path: str) -> tuple[object, bytes]:
    try:
        raw = Path(path).read_bytes() if path != "-" else sys.stdin.buffer.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise PatternFormatError("<json>", str(exc)) from None


def _load_graph(path: str):
    """Pattern or graph JSON -> (graph, pattern or None, raw bytes)."""
    obj, raw = _read_input(path)
    if isinstance(obj, dict) and "vertices" in obj:
        try:
            return graph_from_obj(obj), None, raw
        except (ValueError, KeyError) as exc:
            raise PatternFormatError("vertices/edges", str(exc)) from None
    pattern = parse_pattern(obj)
    return pattern_graph(pattern), pattern, raw


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p if isinstance(p, bytes) else repr(p).encode())
    return h.hexdigest()


def _emit(args, command: str, digest: str, payload: dict, started: float) -> None:
    report = {"command": command, "inputs_digest": digest, "result": payload}
    if not args.stable_output:
        report["wall_time_s"] = round(time.perf_counter() - started, 3)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _progress(args):
    if args.stable_output:
        return None

    def report(done, total):
        if done == total or done % max(1, total // 20) == 0:
            print(f"  {done}/{total} vertices", file=sys.stderr, flush=True)

    return report


def cmd_build(args) -> int:
    started = time.perf_counter()
    g, _, raw = _load_graph(args.pattern)
    if args.dot:
        Path(args.dot).write_text(export_dot(g))
    _emit(args, "build", _digest(raw), graph_to_obj(g), started)
    return EXIT_OK


def cmd_perfect(args) -> int:
    started = time.perf_counter()
    g, _, raw = _load_graph(args.input)
    verdict = is_perfect(g, args.limit)
    _emit(args, "perfect", _digest(raw, args.limit), verdict.to_obj(), started)
    return EXIT_OK if verdict.perfect else EXIT_NEGATIVE


def cmd_speedup(args) -> int:
    started = time.perf_counter()
    _, pattern, raw = _load_graph(args.pattern)
    if pattern is None:
        raise UsageError("speedup needs a traffic pattern, not a bare graph")
    res = pattern_speedup(pattern, args.limit)
    _emit(args, "speedup", _digest(raw), res.to_obj(), started)
    return EXIT_OK


def _graph_from_args(args) -> tuple[ConflictGraph, bytes]:
    if args.input:
        g, _, raw = _load_graph(args.input)
        return g, raw
    if args.K is None or args.N is None:
        raise UsageError("give an input file or both --K and --N")
    return build_kn_graph(args.K, args.N), repr((args.K, args.N)).encode()


def cmd_imp(args) -> int:
    started = time.perf_counter()
    g, raw = _graph_from_args(args)
    res = imperfection_ratio_exact(g, jobs=args.jobs, progress=_progress(args))
    _emit(args, "imp", _digest(raw), res.to_obj(), started)
    return EXIT_OK


def cmd_bounds(args) -> int:
    started = time.perf_counter()
    report = bound_report(args.K, args.N)
    _emit(args, "bounds", _digest(args.K, args.N), report.to_obj(), started)
    return EXIT_OK


def cmd_verify_conjecture(args) -> int:
    started = time.perf_counter()
    if args.N > LONG_N and not args.allow_long:
        raise UsageError(f"N={args.N} is a long run; pass --allow-long")
    res = class_min_speedup(args.K, args.N, jobs=args.jobs, progress=_progress(args))
    payload = res.to_obj()
    payload["structure"] = [
        {"input": i, "outputs": list(o)} for i, o in full_structure(args.K, args.N)
    ]
    payload["conflict_graph_vertices"] = 2 * args.K * args.N
    payload["conjectured"] = format_rational(CONJECTURED)
    payload["matches"] = res.value == CONJECTURED
    _emit(args, "verify-conjecture", _digest(args.K, args.N), payload, started)
    return EXIT_OK if res.value == CONJECTURED else EXIT_NEGATIVE


def cmd_export(args) -> int:
    g, _ = _graph_from_args(args)
    text = export_dot(g) if args.dot else json.dumps(graph_to_obj(g), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--stable-output", action="store_true",
                        help="omit timings and progress so output is byte-identical")
    common.add_argument("--limit", type=int, default=None,
                        help="vertex limit for exponential graph routines (default 40)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for vertex sweeps")
    common.add_argument("--json", action="store_true", help="JSON output (the default)")

    parser = argparse.ArgumentParser(
        prog="ncspeedup",
        description="Exact speedup analysis for network-coded multicast switches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="conflict graph of a traffic pattern")
    p.add_argument("pattern")
    p.add_argument("--dot", metavar="PATH", help="also write Graphviz DOT here")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("perfect", parents=[common], help="perfection test with certificate")
    p.add_argument("input", help="traffic pattern or graph JSON")
    p.set_defaults(func=cmd_perfect)

    p = sub.add_parser("speedup", parents=[common], help="speedup needed by one pattern")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_speedup)

    p = sub.add_parser("imp", parents=[common], help="exact imperfection ratio")
    p.add_argument("input", nargs="?")
    p.add_argument("--K", type=int)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_imp)

    p = sub.add_parser("bounds", parents=[common], help="validated cover bounds for G_{K,N}")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify-conjecture", parents=[common],
                       help="class-wide minimum speedup of the unicast+broadcast structure")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--allow-long", action="store_true", help=f"permit N > {LONG_N}")
    p.set_defaults(func=cmd_verify_conjecture)

    p = sub.add_parser("export", parents=[common], help="serialise a graph as JSON or DOT")
    p.add_argument("input", nargs="?")
    p.add_argument("--K", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--dot", action="store_true", help="DOT instead of JSON")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, TrafficError, SizeLimitError, DimensionLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
