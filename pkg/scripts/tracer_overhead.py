#!/usr/bin/env python3
"""What full instrumentation costs.

Runs each scenario twice: once with no tracers and no task database, once
with every aggregate tracer attached to every component plus the task DB,
and reports the wall-clock overhead.  Uses best-of-N timing to keep the
numbers stable on small scenarios.
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from tickwell.config import TracerSpec, load_config
from tickwell.experiment import run_experiment

REPO = Path(__file__).resolve().parent.parent

FULL_SET = [
    TracerSpec(name="req_avg", kind="average_time", attach_to=["*"],
               category="workload", action="request"),
    TracerSpec(name="req_total", kind="total_time", attach_to=["*"],
               category="workload", action="request"),
    TracerSpec(name="read_busy", kind="busy_time", attach_to=["*"],
               category="memory", action="read"),
    TracerSpec(name="hits", kind="tag_count", attach_to=["*"], tag="cache hit"),
]


def best_of(cfg, out_root, tag, reps):
    walls = []
    for i in range(reps):
        t0 = time.perf_counter()
        run_experiment(cfg, out_root / f"{tag}-{i}")
        walls.append(time.perf_counter() - t0)
    return min(walls)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(REPO / "configs"))
    ap.add_argument("--out", default="overhead-runs")
    ap.add_argument("--only", nargs="*", metavar="NAME")
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    paths = sorted(Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]

    out_root = Path(args.out)
    for path in paths:
        base = load_config(path)
        plain = dataclasses.replace(base, tracers=[], trace_file=None)
        traced = dataclasses.replace(base, tracers=FULL_SET,
                                     trace_file="trace.csv")
        wu = best_of(plain, out_root, f"{path.stem}-plain", args.reps)
        wt = best_of(traced, out_root, f"{path.stem}-traced", args.reps)
        print(f"{path.stem:12s} untraced={wu:7.3f}s traced={wt:7.3f}s "
              f"overhead={(wt / wu - 1) * 100:+6.1f}%")
    return 0


if __name__ == "__main__":
    sys.exit(main())
