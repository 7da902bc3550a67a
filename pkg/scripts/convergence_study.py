"""Observed global orders of the explicit schemes on y' = -y, n = 1..8.

    python scripts/convergence_study.py                 # print the table
    python scripts/convergence_study.py --write-goldens # refresh tests/data
"""

import argparse
import json
import math
from pathlib import Path

from expospec.cli import convergence_table
from expospec.problems import get_problem
from expospec.schemes import build_explicit

GOLDEN_PATH = Path(__file__).resolve().parents[1] / "tests" / "data" / "convergence_goldens.json"
GOLDEN_DEGREES = (2, 4, 8)
H0, LEVELS = 0.1, 6


def study(degrees, h0=H0, levels=LEVELS):
    decay = get_problem("decay")
    return {n: convergence_table(decay, build_explicit(n), h0, levels) for n in degrees}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--write-goldens", action="store_true")
    args = ap.parse_args()

    results = study(range(1, args.n_max + 1))
    for n, rows in results.items():
        print(f"n={n}")
        for h, err, order in rows:
            o = "" if order is None else f"{order:.4f}"
            # err / (h e^-1) tends to the local error constant for n = 1
            print(f"  h={h:<10.6g} err={err:.6e} order={o:>7}  err/(h e^-1)={err / (h * math.exp(-1)):.5f}")

    if args.write_goldens:
        golden = {
            "problem": "decay",
            "h0": H0,
            "levels": LEVELS,
            "orders": {str(n): [o for _, _, o in study([n])[n][1:]] for n in GOLDEN_DEGREES},
        }
        GOLDEN_PATH.write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")
        print(f"wrote {GOLDEN_PATH}")


if __name__ == "__main__":
    main()
