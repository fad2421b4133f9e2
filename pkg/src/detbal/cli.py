"""Command-line entry point: ``detbal {sweep,check,evolve,rates} --config run.yaml``.

Exit status is 0 on success, 2 for an invalid configuration and 3 when any
numerical step fails.
"""

import argparse
import json
import sys

from .config import load_config
from .errors import ConfigError, DetbalError
from .runner import run_check, run_dbe_sweep, run_evolve, run_rates

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="detbal", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML run configuration")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--quad-tol", type=float, help="relative quadrature tolerance")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="I ratios and thermalization conditions vs beta")
    sub.add_parser("check", parents=[common], help="T-matrix defects and rate identities")
    sub.add_parser("evolve", parents=[common], help="population relaxation and entropy production")
    sub.add_parser("rates", parents=[common], help="full rate tables")
    return parser


def _summary(command, result, out):
    if command == "sweep":
        failed = result.failed
        print(f"sweep: {len(result.rows)} rows, {len(failed)} failed -> {out}")
        return EXIT_NUMERIC if failed else EXIT_OK
    if command == "check":
        print(json.dumps(result["defects"], indent=1, sort_keys=True))
        worst = max(t["identity_residual_max"] for t in result["temperatures"])
        print(f"check: max identity residual {worst:.3e} -> {out}")
        return EXIT_OK
    if command == "evolve":
        _, rows, summary = result
        print(f"evolve: {len(rows)} checkpoints, final trace distance "
              f"{summary['final_trace_distance']:.3e}, sigma >= 0: "
              f"{summary['sigma_nonnegative']} -> {out}")
        return EXIT_OK
    tables, rows = result
    print(f"rates: {len(tables)} temperatures, {len(rows)} rows -> {out}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.quad_tol is not None and not 0 < args.quad_tol < 1:
            raise ConfigError(f"--quad-tol must lie in (0, 1), got {args.quad_tol}")
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")
        config = config.with_overrides(rtol=args.quad_tol, fmt=args.format)
    except ConfigError as exc:
        print(f"detbal: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or config.out_dir
    try:
        if args.command == "sweep":
            result = run_dbe_sweep(config, args.jobs, out)
        elif args.command == "check":
            result = run_check(config, args.jobs, out)
        elif args.command == "evolve":
            result = run_evolve(config, out_dir=out)
        else:
            result = run_rates(config, args.jobs, out)
    except DetbalError as exc:
        print(f"detbal: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return _summary(args.command, result, out)


if __name__ == "__main__":
    sys.exit(main())
