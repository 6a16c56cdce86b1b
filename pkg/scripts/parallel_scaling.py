#!/usr/bin/env python3
"""Serial vs parallel engine: agreement and scaling on the shipped scenarios.

For each scenario this runs a serial baseline, then the parallel engine at
each requested worker count (optionally several repetitions to shake thread
interleavings), byte-compares every parallel run against the baseline, and
prints wall-clock speedups.  Expect speedups only on multi-core hosts
running dense scenarios; the point of the comparison column is that the
answer never changes either way.
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from tickwell.config import load_config
from tickwell.experiment import compare_runs, run_experiment

REPO = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(REPO / "configs"))
    ap.add_argument("--out", default="scaling-runs")
    ap.add_argument("--only", nargs="*", metavar="NAME")
    ap.add_argument("--workers", type=int, nargs="*", default=[2, 4])
    ap.add_argument("--reps", type=int, default=1,
                    help="parallel repetitions per worker count")
    args = ap.parse_args()

    paths = sorted(Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]

    mismatches = 0
    for path in paths:
        base = load_config(path)
        t0 = time.perf_counter()
        serial = run_experiment(dataclasses.replace(base, engine_mode="serial"),
                                Path(args.out) / f"{path.stem}-serial")
        ws = time.perf_counter() - t0
        line = [f"{path.stem:12s} serial={ws:6.2f}s"]
        for w in args.workers:
            cfg = dataclasses.replace(base, engine_mode="parallel", workers=w)
            walls, equal = [], True
            for rep in range(args.reps):
                out = Path(args.out) / f"{path.stem}-w{w}-r{rep}"
                t0 = time.perf_counter()
                run_experiment(cfg, out)
                walls.append(time.perf_counter() - t0)
                ok, report = compare_runs(serial.out_dir, out)
                if not ok:
                    equal = False
                    mismatches += 1
                    print(f"{path.stem} workers={w} rep={rep} diverged:\n{report}",
                          file=sys.stderr)
            wp = min(walls)
            line.append(f"w{w}={wp:6.2f}s ({ws / wp:4.2f}x, equal={equal})")
        print("  ".join(line))
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
