"""Command-line front end.

Subcommands: ``tableau``, ``solve``, ``convergence``, ``stability``,
``orthocheck``.  Structured output is minified, key-sorted JSON with every
float written to 17 significant digits; trajectories are comma-separated.

Exit statuses: 0 success, 2 non-finite state, 3 Newton divergence,
4 step-size underflow, 64 usage error.
"""

import argparse
import math
import sys

import numpy as np

from .basis import orthogonality_report
from .errors import (
    IllConditionedBasisError,
    InvalidDegreeError,
    NewtonDivergenceError,
    NonFiniteStateError,
    StepSizeUnderflowError,
    UnknownProblemError,
)
from .genmethods import astable2_tableau, lstable2_tableau
from .integrate import AdaptiveConfig, solve_adaptive, solve_fixed
from .problems import get_problem, problem_names
from .schemes import build_explicit, build_implicit
from .stability import (
    a_stability_check,
    is_l_stable,
    limit_at_minus_infinity,
    region_raster,
    stability_function,
)

EXIT_NONFINITE = 2
EXIT_NEWTON = 3
EXIT_UNDERFLOW = 4
EXIT_USAGE = 64

SCHEMES = ("explicit", "implicit", "astable2", "lstable2")


class UsageError(Exception):
    pass


def fmt(x):
    return "%.17g" % x


def dumps(obj):
    """Canonical JSON: sorted keys, no whitespace, fixed float format."""
    if isinstance(obj, dict):
        return "{" + ",".join(f"{dumps(str(k))}:{dumps(obj[k])}" for k in sorted(obj)) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if math.isfinite(obj):
            return fmt(float(obj))
        return '"' + ("inf" if obj > 0 else "-inf" if obj < 0 else "nan") + '"'
    if obj is None:
        return "null"
    s = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def _method(scheme, n):
    if scheme in ("explicit", "implicit"):
        if n is None:
            raise UsageError(f"--n is required for --scheme {scheme}")
        try:
            return build_explicit(n) if scheme == "explicit" else build_implicit(n)
        except InvalidDegreeError as exc:
            raise UsageError(str(exc)) from None
    if n is not None:
        raise UsageError(f"--n is not accepted for --scheme {scheme}")
    return astable2_tableau() if scheme == "astable2" else lstable2_tableau()


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def tableau_document(scheme, n=None):
    m = _method(scheme, n)
    if scheme == "explicit":
        return {
            "scheme": scheme,
            "n": m.n,
            "nu": m.nu,
            "mu": [m.mu[p, :p].tolist() for p in range(1, m.n + 1)],
            "sigma": m.sigma_out,
            "dense": m.dense.ravel(),
        }
    if scheme == "implicit":
        return {"scheme": scheme, "n": m.n, "nu": m.nu, "sigma0": m.sigma0, "sigma": m.sigma.ravel()}
    return {"scheme": scheme, "stages": m.stages, "c": m.c, "A": m.A.ravel(), "b": m.b}


def cmd_tableau(args):
    _write(dumps(tableau_document(args.scheme, args.n)) + "\n", args.output)
    return 0


def _parse_params(pairs):
    params = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params[key] = float(value)
    return params


def _problem(args):
    params = _parse_params(args.param)
    if getattr(args, "t_final", None) is not None:
        params["t_final"] = args.t_final
    try:
        return get_problem(args.problem, **params)
    except UnknownProblemError as exc:
        raise UsageError(str(exc)) from None
    except TypeError as exc:
        raise UsageError(f"bad parameter for {args.problem}: {exc}") from None


def _trajectory_csv(traj):
    dim = traj.states.shape[1]
    lines = ["T," + ",".join(f"Y{i}" for i in range(dim))]
    for t, y in zip(traj.times, traj.states):
        lines.append(",".join([fmt(t)] + [fmt(v) for v in y]))
    return "\n".join(lines) + "\n"


def cmd_solve(args):
    named = _problem(args)
    if args.adaptive:
        if args.scheme != "explicit":
            raise UsageError("--adaptive is available for --scheme explicit only")
        if args.n is None or args.n < 2:
            raise UsageError("--adaptive needs --n >= 2")
        config = AdaptiveConfig(
            rtol=args.rtol,
            atol=args.atol if args.atol is not None else args.rtol,
            h_initial=args.h_initial,
            h_min=args.h_min,
            h_max=args.h_max,
        )
        traj = solve_adaptive(named.problem, args.n, config)
    else:
        if args.h is None or not args.h > 0:
            raise UsageError("a positive --h (or --adaptive) is required")
        traj = solve_fixed(named.problem, _method(args.scheme, args.n), args.h)
    _write(_trajectory_csv(traj), args.output)
    print(f"# {named.name} {args.scheme}: {traj.stats.summary()}", file=sys.stderr)
    return 0


def convergence_table(named, method, h0, levels):
    if not named.has_closed_form:
        raise UsageError(f"problem {named.name!r} has no closed-form reference")
    exact = named.reference(named.problem.t_final)
    rows = []
    prev = None
    for i in range(levels):
        h = h0 / 2**i
        traj = solve_fixed(named.problem, method, h)
        err = float(np.max(np.abs(traj.y_end - exact)))
        if prev is None:
            order = None
        elif prev == 0.0 and err == 0.0:
            order = "exact"
        elif err == 0.0 or prev == 0.0:
            order = math.inf if err == 0.0 else -math.inf
        else:
            order = math.log2(prev / err)
        rows.append((h, err, order))
        prev = err
    return rows


def cmd_convergence(args):
    named = _problem(args)
    rows = convergence_table(named, _method(args.scheme, args.n), args.h0, args.levels)
    lines = ["h,error,order"]
    for h, err, order in rows:
        o = "" if order is None else order if isinstance(order, str) else fmt(order)
        lines.append(f"{fmt(h)},{fmt(err)},{o}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def stability_document(scheme, n, re_range, im_range, resolution):
    R = stability_function(_method(scheme, n))
    raster = region_raster(R, re_range, im_range, resolution)
    report = a_stability_check(R)
    doc = {
        "scheme": scheme,
        "P": R.P,
        "Q": R.Q,
        "real_interval": list(raster.real_interval),
        "a_stable": report.a_stable,
        "l_stable": is_l_stable(R),
        "limit_minus_infinity": limit_at_minus_infinity(R),
        "max_abs_imag_axis": report.max_abs_imag_axis,
        "re_range": list(re_range),
        "im_range": list(im_range),
    }
    if n is not None:
        doc["n"] = n
    return doc, raster


def cmd_stability(args):
    if not 1 <= args.resolution <= 4096:
        raise UsageError("--resolution must lie in 1..4096")
    doc, raster = stability_document(args.scheme, args.n, tuple(args.re), tuple(args.im), args.resolution)
    if args.pbm:
        _write(raster.to_pbm(), args.pbm)
    _write(dumps(doc) + "\n", args.output)
    return 0


def cmd_orthocheck(args):
    degrees = range(1, args.n + 1) if args.all else [args.n]
    out = {}
    for n in degrees:
        try:
            orth, integ = orthogonality_report(n)
        except InvalidDegreeError as exc:
            raise UsageError(str(exc)) from None
        out[str(n)] = {"orthogonality": orth, "integral": integ}
    _write(dumps(out) + "\n", args.output)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="expospec", description="Spectral ODE integrators built on orthogonal exponential polynomials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scheme_args(p, default=None):
        p.add_argument("--scheme", choices=SCHEMES, default=default, required=default is None)
        p.add_argument("--n", type=int, help="degree, for explicit/implicit schemes only")

    def problem_args(p):
        p.add_argument("--problem", required=True, help=f"one of: {', '.join(problem_names())}")
        p.add_argument("--param", action="append", metavar="KEY=VALUE", help="problem parameter (repeatable)")
        p.add_argument("--t-final", type=float, dest="t_final")

    p = sub.add_parser("tableau", help="print scheme coefficients")
    scheme_args(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tableau)

    p = sub.add_parser("solve", help="integrate a catalog problem, CSV to stdout or --output")
    problem_args(p)
    scheme_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--h", type=float, help="fixed step size")
    mode.add_argument("--adaptive", action="store_true", help="adaptive degree n vs n-1 control")
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--atol", type=float)
    p.add_argument("--h-initial", type=float, default=1e-3, dest="h_initial")
    p.add_argument("--h-min", type=float, default=1e-12, dest="h_min")
    p.add_argument("--h-max", type=float, default=1.0, dest="h_max")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("convergence", help="endpoint errors over a halving sequence of steps")
    problem_args(p)
    scheme_args(p)
    p.add_argument("--h0", type=float, default=0.1)
    p.add_argument("--levels", type=int, default=6, help="number of step sizes (at least 5)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("stability", help="stability region bitmap and coefficients")
    scheme_args(p)
    p.add_argument("--re", type=float, nargs=2, default=[-6.0, 2.0], metavar=("LO", "HI"))
    p.add_argument("--im", type=float, nargs=2, default=[-4.0, 4.0], metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=201)
    p.add_argument("--pbm", help="write the P1 bitmap here")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("orthocheck", help="discrete orthogonality residuals of the basis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--all", action="store_true", help="report every degree 1..n")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_orthocheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "levels", 5) < 5:
        parser.error("--levels must be at least 5")
    try:
        # overflow inside a right-hand side is reported through the exit status
        with np.errstate(over="ignore", invalid="ignore"):
            return args.func(args)
    except UsageError as exc:
        print(f"expospec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteStateError as exc:
        print(f"expospec: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except NewtonDivergenceError as exc:
        print(f"expospec: {exc}", file=sys.stderr)
        return EXIT_NEWTON
    except StepSizeUnderflowError as exc:
        print(f"expospec: {exc}", file=sys.stderr)
        return EXIT_UNDERFLOW
    except IllConditionedBasisError as exc:
        print(f"expospec: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
