"""Command-line entry point: ``stochbbm <subcommand> --config FILE [overrides]``.

Exit codes: 0 success, 1 a study check failed, 2 configuration error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments as ex
from .config import SimConfig, load_config
from .errors import ConfigError, NumericError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3

COMMANDS = {
    "simulate": lambda cfg, a: ex.run_simulate(cfg, a.out_dir),
    "energy-study": lambda cfg, a: ex.run_energy_conservation(cfg, a.out_dir),
    "drift-study": lambda cfg, a: ex.run_energy_drift_study(cfg, a.out_dir),
    "lambda-study": lambda cfg, a: ex.run_lambda_study(cfg, None, a.out_dir),
    "truncation-study": lambda cfg, a: ex.run_truncation_consistency(cfg, None, a.out_dir),
    "order-study": lambda cfg, a: ex.run_order_study(cfg, a.out_dir),
    "ensemble": lambda cfg, a: ex.run_ensemble(cfg, a.out_dir, workers=a.workers),
    "estimate-ch": lambda cfg, a: ex.run_estimate_CH(cfg, a.out_dir),
    "picard": lambda cfg, a: ex.run_picard_study(cfg, out_dir=a.out_dir),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochbbm",
        description="Pseudospectral simulator for a stochastic BBM-type equation "
                    "with transport noise.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file (defaults if omitted)")
        p.add_argument("--dt", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--scheme")
        p.add_argument("--out-dir", default=None,
                       help="write config.echo, report.json and trajectories here")
        p.add_argument("--workers", type=int, default=1,
                       help="threads for ensemble members (results do not depend on it)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = {k: v for k, v in (("dt", args.dt), ("seed", args.seed), ("scheme", args.scheme))
                 if v is not None}
    return cfg.replace(**overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        report = COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    from .io import _jsonable
    print(json.dumps(_jsonable(report.to_dict()["metrics"]), indent=2, sort_keys=True))
    if report.metrics.get("diverged") or report.metrics.get("n_diverged"):
        return EXIT_DIVERGED
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
