"""``verify`` command line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .corpus import ENV_VAR, CorpusError
from .harness import ALL, CHECKS, SUITES, SuiteSpec, emit_report, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="verify",
        description="Run seeded identity suites over the scenario corpus and write a report.",
        epilog=f"The corpus directory defaults to ${ENV_VAR} if set, else the packaged corpus.",
    )
    p.add_argument("--suite", required=True, choices=SUITES + (ALL,))
    p.add_argument("--samples", type=_positive, default=10000, help="sample budget per check and datum")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--corpus", type=Path, default=None, help="corpus directory")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    p.add_argument("--timings", action="store_true", help="record wall-clock seconds (breaks byte determinism)")
    p.add_argument("--only", action="append", default=[], metavar="CHECK", help="restrict to a check id (repeatable)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    known = {c.identity for specs in CHECKS.values() for c in specs}
    unknown = sorted(set(args.only) - known)
    if unknown:
        parser.error(f"unknown check id(s): {', '.join(unknown)}")
    spec = SuiteSpec(
        args.suite, args.samples, args.seed,
        str(args.corpus) if args.corpus else None,
        str(args.out) if args.out else None,
        args.fmt, args.jobs, args.timings, tuple(args.only),
    )
    try:
        report = run_suite(spec)
    except CorpusError as e:
        print(f"verify: corpus error: {e}", file=sys.stderr)
        return EXIT_USAGE
    data = emit_report(report, spec.fmt)
    if spec.out:
        try:
            Path(spec.out).write_bytes(data)
        except OSError as e:
            print(f"verify: cannot write {spec.out}: {e}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    failed = [r for r in report.records if not r.passed]
    for r in failed:
        print(f"FAIL {r.identity} [{r.datum}]: {r.failures}/{r.samples}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
