"""Largest zero of the weighted second-degree polynomial against alpha.

    python scripts/gamma_scan.py [--omega 1] [--alpha 0 1 2 ...]

Values at or below one give collocation nodes inside a unit step.  No
optimality claim is made about any particular alpha.
"""

import argparse

from expospec.errors import NoValidZeroError
from expospec.genmethods import GAMMA2, scan_gamma


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--omega", type=int, default=1)
    ap.add_argument("--alpha", type=int, nargs="+", default=list(range(0, 11)))
    args = ap.parse_args()
    print(f"reference value for alpha = beta = 6: {GAMMA2:.10f}")
    for alpha in args.alpha:
        try:
            (_, g), = scan_gamma(2, args.omega, [alpha])
        except NoValidZeroError as exc:
            print(f"alpha={alpha:2d}: {exc}")
            continue
        print(f"alpha={alpha:2d}  gamma={g:.10f}  {'<= 1' if g <= 1.0 else '> 1'}")


if __name__ == "__main__":
    main()
