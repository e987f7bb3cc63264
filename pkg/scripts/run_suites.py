#!/usr/bin/env python3
"""Run verification suites and write one JSON and one CSV report per suite.

    python3 scripts/run_suites.py                      # every suite, default sizes
    python3 scripts/run_suites.py lemma3.4 thm1.1 --trials 500 --seed 3
"""
import argparse
import time
from pathlib import Path

from kummer.suites import SUITES, check_lemma


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suites", nargs="*", default=sorted(SUITES))
    ap.add_argument("--trials", type=int, default=None, help="override the per-config trial count")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    worst = 0
    print(f"{'suite':22} {'mode':7} {'trials':>7} {'pass':>7} {'fail':>6} {'incl':>5} {'sec':>7}")
    for name in args.suites:
        t0 = time.perf_counter()
        rep = check_lemma(name, trials=args.trials, seed=args.seed)
        dt = time.perf_counter() - t0
        (args.out / f"{name}.json").write_text(rep.dumps())
        (args.out / f"{name}.csv").write_text(rep.to_csv())
        print(f"{name:22} {rep.mode:7} {rep.trials:7d} {rep.passes:7d} {len(rep.failures):6d} "
              f"{rep.count('inconclusive'):5d} {dt:7.1f}")
        worst = max(worst, rep.exit_code())
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
