"""Command line front end.

    noregret solve|sweep|pareto|compare|ascent|audit --data FILE --config FILE
        [--theta-lo X --theta-hi X --k N --format json|csv|summary --seed N --out FILE]

Exit codes: 0 ok, 2 config, 3 ingestion, 4 infeasible, 5 singular Hessian,
6 complexity cap.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import NoRegretError
from .report import COMMANDS, FORMATS, emit_report, run, write_atomic


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noregret", description="Fairness without regret.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--data", help="population CSV (overrides the config)")
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--theta-lo", dest="theta_lo", help="lower end of the theta interval, e.g. 1/3")
    parser.add_argument("--theta-hi", dest="theta_hi", help="upper end of the theta interval")
    parser.add_argument("--k", type=int, help="selection size")
    parser.add_argument("--format", default="json", choices=FORMATS)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--problem", help="registered smooth problem for 'ascent'")
    parser.add_argument("--timing", action="store_true", help="include wall time in structured output")
    parser.add_argument("--out", help="output file (default: stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).override(
            data=args.data, k=args.k, seed=args.seed,
            theta_lo=args.theta_lo, theta_hi=args.theta_hi, problem=args.problem,
        )
        report = run(cfg, args.command)
        payload = emit_report(report, args.format, include_timing=args.timing)
    except NoRegretError as exc:
        print(f"noregret: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        write_atomic(args.out, payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
