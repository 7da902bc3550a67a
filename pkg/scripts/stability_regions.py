"""Stability functions, verdicts and region bitmaps for every scheme family.

    python scripts/stability_regions.py [--out DIR] [--resolution 401]

Writes one P1 bitmap per method into DIR (default ./regions) and prints
coefficients, the real-axis interval, A/L verdicts and, for explicit
schemes, the monotonicity threshold and end-row weight signs.
"""

import argparse
from pathlib import Path

from expospec.genmethods import astable2_tableau, euler_tableau, lstable2_tableau
from expospec.schemes import build_explicit, build_implicit
from expospec.stability import (
    a_stability_check,
    is_l_stable,
    limit_at_minus_infinity,
    monotonicity_threshold,
    region_raster,
    sigma_sign_report,
    stability_function,
)


def methods():
    yield "euler", euler_tableau()
    for n in range(1, 5):
        yield f"explicit{n}", build_explicit(n)
    for n in range(1, 4):
        yield f"implicit{n}", build_implicit(n)
    yield "astable2", astable2_tableau()
    yield "lstable2", lstable2_tableau()


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("regions"))
    ap.add_argument("--resolution", type=int, default=401)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for label, m in methods():
        R = stability_function(m)
        raster = region_raster(R, (-12.0, 4.0), (-8.0, 8.0), args.resolution)
        (args.out / f"{label}.pbm").write_text(raster.to_pbm())
        rep = a_stability_check(R)
        print(f"{label}: P={R.P.round(6).tolist()} Q={R.Q.round(6).tolist()}")
        print(
            f"    real interval [{raster.real_interval[0]:.6g}, 0]  A-stable={rep.a_stable}"
            f" (max|R(iy)|={rep.max_abs_imag_axis:.9f})  L-stable={is_l_stable(R)}"
            f"  R(-inf)={limit_at_minus_infinity(R):.6g}"
        )
        if R.is_polynomial:
            print(f"    monotonicity threshold {monotonicity_threshold(m):.7f}")

    print("end-row weight signs of the explicit schemes:")
    for n, row in sigma_sign_report(8).items():
        print(f"  n={n}: negative={row['negative']}  min={min(row['sigma']):.4g}")


if __name__ == "__main__":
    main()
