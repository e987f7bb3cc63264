#!/usr/bin/env python3
"""Certify the thresholds for the three tested values of k and store them as JSON.

The search grid is uniform in log log t; the default cap is log log t = 200
with spacing 1/16, which is the grid the lemma3.6 suite samples from.
"""
import argparse
import json
import time
from fractions import Fraction
from pathlib import Path

from kummer.bounds import SUGGESTED_DELTA, SearchExhausted, derive_constants


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cap-loglog", type=Fraction, default=Fraction(200))
    ap.add_argument("--grid-step", type=Fraction, default=Fraction(1, 16))
    ap.add_argument("--out", type=Path, default=Path("results/constants.json"))
    args = ap.parse_args()

    table, status = {}, 0
    for k, delta in SUGGESTED_DELTA.items():
        t0 = time.perf_counter()
        try:
            cfg = derive_constants(k, delta, cap_loglog=args.cap_loglog, grid_step=args.grid_step)
        except SearchExhausted as exc:
            print(f"k={k}: search exhausted ({exc})")
            status = 3
            continue
        table[str(k)] = cfg.to_json()
        print(f"k={str(k):4} delta={str(delta):4} c1={cfg.c1} "
              f"loglog c3={float(cfg.c3_loglog):.2f} loglog c4={float(cfg.c4_loglog):.2f} "
              f"({time.perf_counter() - t0:.1f}s)")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
