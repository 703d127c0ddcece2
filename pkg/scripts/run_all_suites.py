#!/usr/bin/env python3
"""Run every verification suite, print per-suite wall time, exit 0/1.

Usage: run_all_suites.py [out_dir] [seed]
Artifacts (JSON + CSV per suite) land in out_dir, default ./artifacts.
"""

import sys
import time

from fracheat.cli import main


def run(out_dir: str = "artifacts", seed: str = "0") -> int:
    from fracheat.suites import SUITES

    worst = 0
    for name in SUITES:
        t0 = time.perf_counter()
        code = main(["verify", name, "--out", out_dir, "--seed", seed])
        print(f"  ({time.perf_counter() - t0:6.1f}s)  {name}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:3]))
