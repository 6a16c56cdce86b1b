#!/usr/bin/env python3
"""Run shipped scenario configs and summarize each outcome on one line.

Outputs land under --out (one subdirectory per scenario) with the usual
summary.json / metrics.csv / trace.csv files, so runs made here can be fed
to `tickwell compare` or diffed across engine settings.
"""

import argparse
import sys
import time
from pathlib import Path

from tickwell.config import load_config
from tickwell.experiment import run_experiment

REPO = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=str(REPO / "configs"),
                    help="directory holding scenario JSON files")
    ap.add_argument("--out", default="scenario-runs", help="output root")
    ap.add_argument("--only", nargs="*", metavar="NAME",
                    help="scenario names to run (default: every config)")
    args = ap.parse_args()

    paths = sorted(Path(args.configs).glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]
    if not paths:
        print("no configs matched", file=sys.stderr)
        return 2

    worst = 0
    for path in paths:
        cfg = load_config(path)
        t0 = time.perf_counter()
        res = run_experiment(cfg, Path(args.out) / path.stem)
        wall = time.perf_counter() - t0
        m = res.summary["metrics"]
        print(f"{path.stem:12s} {res.status:9s} t={res.final_time_ticks:>12,d} "
              f"msgs={m['messages_delivered']:>9,d} wall={wall:7.2f}s "
              f"-> {res.out_dir}")
        worst = max(worst, res.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
