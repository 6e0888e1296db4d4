"""Command-line entry point.

Verbs: validate, analyze, simulate, sweep.  Exit codes: 0 success, 2 config
error, 3 solver or oracle failure.
"""

import argparse
import sys

from .analysis import analyze_steady_state, emit, run_experiment, simulate_replications
from .config import load_config
from .errors import (
    ConfigInvalid,
    HetnetError,
    IoFailure,
    QuadratureFailure,
    ReducibleChain,
    SolverFailure,
    StateSpaceTooLarge,
)

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hetnet",
        description="LTE/Wi-Fi cluster performance: analytic chain and simulation",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a config file")
    p.add_argument("config")

    for verb, help_text in (
        ("analyze", "solve the occupancy chain and report steady-state metrics"),
        ("sweep", "run the configured parameter sweep"),
    ):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument("config")
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("simulate", help="run agent-based replications")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=1)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigInvalid as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.verb == "validate":
        print(f"{args.config}: ok")
        return 0

    try:
        if args.verb == "analyze":
            rows = analyze_steady_state(cfg)
        elif args.verb == "sweep":
            rows = run_experiment(cfg)
        else:
            seed = cfg.simulation.seed if args.seed is None else args.seed
            rows = simulate_replications(cfg, seed, args.reps)
        emit(rows, args.format, args.output)
    except ConfigInvalid as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverFailure, ReducibleChain, QuadratureFailure, StateSpaceTooLarge) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (IoFailure, HetnetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
