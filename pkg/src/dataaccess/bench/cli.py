"""``dabench`` command line entry point.

Exit codes: 0 success, 1 configuration error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from ..convert import instantiation_audit
from .experiments import DEFAULT_SIZES, bench_chunks, bench_dispatch, bench_fastpath, bench_pairs
from .harness import BenchConfig, ConfigurationError, InvariantViolation
from .report import FORMATS, emit_report, summarize

log = logging.getLogger("dabench")

DEFAULT_CHUNK_TOTALS = (1_000, 10_000, 100_000)
DEFAULT_CHUNK_LENS = (16, 256, 4096)
DEFAULT_DISPATCH_ELEMENTS = (10**6,)
DEFAULT_FASTPATH_ELEMENTS = (2**16,)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sizes", type=_int_list, help="comma list of sizes / element counts")
    common.add_argument("--chunk-lens", type=_int_list, help="comma list of chunk lengths")
    common.add_argument("--repeats", type=int, default=30)
    common.add_argument("--warmup", type=int, default=5)
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="fixture data seed")
    common.add_argument("--force-slow-path", action="store_true",
                        help="route same-kind array copies through the element-wise path")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="dabench", description="Data access conversion benchmarks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("pairs", parents=[common], help="all-pairs container assignment sweep")
    sub.add_parser("chunks", parents=[common], help="chunked read cost regression")
    sub.add_parser("dispatch", parents=[common], help="callback vs per-element dynamic access")
    sub.add_parser("fastpath", parents=[common], help="block copy vs element-wise copy")
    sub.add_parser("audit", parents=[common], help="converter instantiation audit")
    sub.add_parser("all", parents=[common], help="every experiment plus the audit")
    return parser


def _audit_text(fmt: str) -> str:
    report = asdict(instantiation_audit())
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "md":
        keys = list(report)
        return ("| " + " | ".join(keys) + " |\n|" + "---|" * len(keys) + "\n| "
                + " | ".join(str(report[k]) for k in keys) + " |\n")
    return ",".join(report) + "\n" + ",".join(str(v) for v in report.values()) + "\n"


def run(args) -> str:
    if args.command == "audit":
        return _audit_text(args.format)

    config = BenchConfig(repeats=args.repeats, warmup=args.warmup, min_repeats=1, min_warmup=0)
    rows = []
    fit = None
    summary_extra = {}
    cmd = args.command

    if cmd in ("pairs", "all"):
        sizes = args.sizes or DEFAULT_SIZES
        log.info("pairs: sizes %s", sizes)
        rows += bench_pairs(sizes, config, seed=args.seed)
    if cmd in ("chunks", "all"):
        totals = args.sizes if cmd == "chunks" and args.sizes else DEFAULT_CHUNK_TOTALS
        result = bench_chunks(totals, args.chunk_lens or DEFAULT_CHUNK_LENS, config, seed=args.seed)
        rows += result.rows
        fit = result.fit
    if cmd in ("dispatch", "all"):
        counts = args.sizes if cmd == "dispatch" and args.sizes else DEFAULT_DISPATCH_ELEMENTS
        for n in counts:
            rows += bench_dispatch(n, config, seed=args.seed).rows
    if cmd in ("fastpath", "all"):
        counts = args.sizes if cmd == "fastpath" and args.sizes else DEFAULT_FASTPATH_ELEMENTS
        for n in counts:
            rows += bench_fastpath(n, config, seed=args.seed, force_slow=args.force_slow_path).rows
    if cmd == "all":
        summary_extra["audit"] = asdict(instantiation_audit())

    summary = summarize(rows, fit)
    summary.update(summary_extra)
    return emit_report(rows, args.format, summary)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        text = run(args)
    except ConfigurationError as exc:
        print(f"dabench: configuration error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"dabench: invariant violation: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
