"""Long adaptive runs on Lorenz and Van der Pol against the reference solver.

    python scripts/boundedness_run.py [--n 4] [--rtol 1e-6]

Stands in for a large nonlinear benchmark: reports whether each run stays
bounded, its cost, and the max-norm deviation from the reference solution
at 20 sampled times.  The explicit family is first order, so the deviation
scales roughly like sqrt(rtol) rather than rtol.
"""

import argparse

import numpy as np

from expospec.integrate import AdaptiveConfig, solve_adaptive
from expospec.problems import get_problem, reference_solve


def run(name, n, rtol):
    named = get_problem(name)
    p = named.problem
    t_eval = np.linspace(p.t_initial, p.t_final, 21)[1:]
    traj = solve_adaptive(p, n, AdaptiveConfig(rtol=rtol, atol=rtol), t_eval=t_eval)
    ref = reference_solve(p, rtol=1e-11, t_eval=t_eval)
    dev = float(np.max(np.abs(traj.y_eval - ref.y_eval)))
    bound = float(np.max(np.abs(traj.states)))
    return traj, dev, bound


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--rtol", type=float, nargs="+", default=[1e-4, 1e-6, 1e-8])
    args = ap.parse_args()
    for name in ("lorenz", "vanderpol"):
        for rtol in args.rtol:
            traj, dev, bound = run(name, args.n, rtol)
            print(
                f"{name:9s} rtol={rtol:.0e}: finite={bool(np.all(np.isfinite(traj.states)))} "
                f"max|y|={bound:.4g} deviation={dev:.3e}  {traj.stats.summary()}"
            )


if __name__ == "__main__":
    main()
