#!/usr/bin/env python3
"""Measure what activity-gated ticking saves, scenario by scenario.

Runs each config once per ticking mode, verifies the outputs are identical,
and reports tick counts and wall-clock for both modes.  The interesting
column is the tick ratio: how much of always-mode's work the smart mode
actually needed to produce the same simulation.
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from tickwell.config import load_config
from tickwell.experiment import compare_runs, run_experiment

REPO = Path(__file__).resolve().parent.parent


def timed_run(cfg, out):
    t0 = time.perf_counter()
    res = run_experiment(cfg, out)
    return res, time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(REPO / "configs"))
    ap.add_argument("--out", default="mode-runs")
    ap.add_argument("--only", nargs="*", metavar="NAME")
    args = ap.parse_args()

    paths = sorted(Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]

    print(f"{'scenario':12s} {'ticks smart':>12s} {'ticks always':>13s} "
          f"{'ratio':>6s} {'wall smart':>10s} {'wall always':>11s} {'speedup':>8s}  equal")
    failures = 0
    for path in paths:
        base = load_config(path)
        smart, ws = timed_run(dataclasses.replace(base, ticking_mode="smart"),
                              Path(args.out) / f"{path.stem}-smart")
        always, wa = timed_run(dataclasses.replace(base, ticking_mode="always"),
                               Path(args.out) / f"{path.stem}-always")
        equal, report = compare_runs(smart.out_dir, always.out_dir)
        ts = smart.summary["engine_stats"]["ticks_executed"]
        ta = always.summary["engine_stats"]["ticks_executed"]
        print(f"{path.stem:12s} {ts:>12,d} {ta:>13,d} {ts / ta:>6.3f} "
              f"{ws:>9.2f}s {wa:>10.2f}s {wa / ws:>7.2f}x  {equal}")
        if not equal:
            failures += 1
            print(report, file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
