"""Command line entry points.

Exit codes: 0 clean finish, 1 model fault, 2 deadlock, 64 invalid
configuration or usage.  ``compare`` exits 0 when the runs match and 1 when
they differ.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import load_config
from .core import ConfigurationError
from .experiment import EXIT_BAD_CONFIG, compare_runs, run_experiment

OUT_DIR_ENV = "TICKWELL_OUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tickwell", description="event-driven hardware simulation runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to experiment JSON")
    run.add_argument("--engine", choices=("serial", "parallel"),
                     help="override engine.mode")
    run.add_argument("--workers", type=int, help="override engine.workers")
    run.add_argument("--ticking", choices=("smart", "always"),
                     help="override ticking.mode")
    run.add_argument("--monitor-port", type=int,
                     help="serve the live monitor API on this port (0 = ephemeral)")
    run.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./tickwell-out)")
    run.add_argument("--seed", type=int, help="override config seed")

    cmp_ = sub.add_parser("compare", help="diff the metrics of two run directories")
    cmp_.add_argument("dir_a")
    cmp_.add_argument("dir_b")
    return parser


def _cmd_run(args, argv) -> int:
    cfg = load_config(args.config)
    if args.engine is not None:
        cfg.engine_mode = args.engine
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigurationError(f"--workers must be >= 1, got {args.workers}")
        cfg.workers = args.workers
    if args.ticking is not None:
        cfg.ticking_mode = args.ticking
    if args.seed is not None:
        cfg.seed = args.seed
    out_dir = args.out or os.environ.get(OUT_DIR_ENV) or "tickwell-out"

    result = run_experiment(cfg, out_dir, argv=argv,
                            monitor_port=args.monitor_port)
    if result.status == "fault":
        print(result.fault_text, file=sys.stderr)
        print(f"run FAULTED at t={result.final_time_ticks}", file=sys.stderr)
    elif result.status == "deadlock":
        print(f"run DEADLOCKED at t={result.final_time_ticks}; stuck buffers:",
              file=sys.stderr)
        for name, level, capacity in result.summary["metrics"]["stuck_buffers"]:
            print(f"  {name}: {level}/{capacity}", file=sys.stderr)
    else:
        m = result.summary["metrics"]
        print(f"run finished at t={m['final_time_ticks']} "
              f"({m['final_time_s']:.9f} s simulated), "
              f"{m['messages_delivered']} messages delivered; "
              f"outputs in {result.out_dir}")
    return result.exit_code


def _cmd_compare(args) -> int:
    equal, report = compare_runs(args.dir_a, args.dir_b)
    print(report, end="")
    return 0 if equal else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args, ["tickwell"] + argv)
        return _cmd_compare(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
