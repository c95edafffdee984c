"""verify: run property suites and write a JSON report.

Exit status: 0 when every instance passes, 1 on any property failure, 2 on
bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import instances as gen
from .ring import make_ring
from .suites import DEFAULT_GRID, PROPERTIES, SUITES, SuiteConfig, replay, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="verify", description="Property-check finite Gorenstein group ring algebra.")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES + ['all'])}")
    p.add_argument("--seed", type=_u64, default=42)
    p.add_argument("--count", type=_positive, default=10, help="instances per property and ring")
    p.add_argument("--ring", action="append", default=None,
                   help="ring as p=<p>,m=<m>,g=<c1:c2:...>; repeat for a grid (default: the standard grid)")
    p.add_argument("--bound", type=_positive, default=65536, help="largest ring for brute-force oracles")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--threads", type=_positive, default=1, help="worker processes, capped by GORENSTEIN_KIT_THREADS")
    p.add_argument("--replay", default=None, help="re-run a counterexample JSON file")
    p.add_argument("--list", action="store_true", help="list properties and exit")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.list:
            for name in sorted(PROPERTIES):
                print(f"{name}: {PROPERTIES[name].anchor}")
            return EXIT_OK
        if args.replay:
            with open(args.replay) as fh:
                ce = json.load(fh)
            ok, err = replay(ce, args.bound)
            print(json.dumps({"property": ce["property"], "passed": ok, "error": err}))
            return EXIT_OK if ok else EXIT_FAIL
        if args.suite != "all" and args.suite not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r}")
        rings = tuple(args.ring) if args.ring else tuple(DEFAULT_GRID)
        for label in rings:
            try:
                make_ring(*gen.parse_ring(label), bound=None)
            except ValueError as exc:
                raise UsageError(f"bad ring {label!r}: {exc}") from None
        cfg = SuiteConfig(args.suite, args.seed, args.count, rings, args.bound, args.out, args.threads)
    except UsageError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(cfg)
    if not args.out:
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    s = report["summary"]
    print(f"{s['properties']} properties, {s['instances']} instances, {s['failures']} failures", file=sys.stderr)
    return EXIT_OK if s["ok"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
