"""Stability functions, stability regions and monotonicity thresholds.

All rational functions are stored as coefficient vectors in ascending
powers of ``z``.  Explicit schemes are propagated exactly through the
Runge formulas applied to ``y' = z y``; implicit tableaux go through the
determinant formula ``det(I - zA + z 1 b^T) / det(I - zA)``, expanded as
polynomials.  Sampling is used only for verdicts and cross-checks.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.polynomial.polynomial as npoly

from .genmethods import ButcherTableau
from .schemes import ExplicitScheme, ImplicitScheme, build_explicit

__all__ = [
    "StabilityFunction",
    "AStabilityReport",
    "Raster",
    "explicit_stability",
    "irk_stability",
    "stability_function",
    "limit_at_minus_infinity",
    "a_stability_check",
    "is_l_stable",
    "real_axis_interval",
    "region_raster",
    "monotonicity_threshold",
    "sigma_sign_report",
]

_TRIM_TOL = 1e-13


def _trim(c):
    c = np.asarray(c, dtype=float)
    scale = max(1.0, float(np.max(np.abs(c))))
    last = len(c)
    while last > 1 and abs(c[last - 1]) <= _TRIM_TOL * scale:
        last -= 1
    return c[:last]


@dataclass(frozen=True)
class StabilityFunction:
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "P", _trim(self.P))
        object.__setattr__(self, "Q", _trim(self.Q))

    @property
    def is_polynomial(self):
        return len(self.Q) == 1 and self.Q[0] == 1.0

    def __call__(self, z):
        z = np.asarray(z)
        return npoly.polyval(z, self.P) / npoly.polyval(z, self.Q)


def explicit_stability(scheme):
    """Stability polynomial of an explicit scheme (degree ``n + 1``).

    Each ``K_p`` for ``y' = z y``, ``h = 1``, ``Y = 1`` is a polynomial in
    ``z``; the recurrence is exact coefficient arithmetic.
    """
    K = []
    for p in range(scheme.stages):
        arg = np.array([1.0])
        for s in range(p):
            arg = npoly.polyadd(arg, scheme.mu[p, s] * K[s])
        K.append(npoly.polymulx(arg))
    y = np.array([1.0])
    for s, k in enumerate(K):
        y = npoly.polyadd(y, scheme.sigma_out[s] * k)
    return StabilityFunction(y, np.array([1.0]))


def _poly_det(M):
    """Determinant of a square matrix whose entries are coefficient vectors.

    Laplace expansion along rows, memoized on the set of remaining columns.
    """
    s = len(M)

    @lru_cache(maxsize=None)
    def minor(row, cols):
        if row == s:
            return (1.0,)
        total = np.array([0.0])
        sign = 1.0
        for idx, col in enumerate(cols):
            entry = M[row][col]
            if np.any(entry):
                rest = cols[:idx] + cols[idx + 1 :]
                term = npoly.polymul(entry, np.array(minor(row + 1, rest)))
                total = npoly.polyadd(total, sign * term)
            sign = -sign
        return tuple(total)

    return np.array(minor(0, tuple(range(s))))


def irk_stability(tableau):
    """Rational stability function of a Runge-Kutta tableau (at most 8 stages)."""
    s = tableau.stages
    if s > 8:
        raise ValueError(f"irk_stability supports at most 8 stages, got {s}")
    A = tableau.A
    B = A - np.outer(np.ones(s), tableau.b)

    def entries(mat):
        return [[np.array([float(i == j), -mat[i, j]]) for j in range(s)] for i in range(s)]

    return StabilityFunction(_poly_det(entries(B)), _poly_det(entries(A)))


def stability_function(method):
    """Dispatch on explicit/implicit schemes and tableaux."""
    if isinstance(method, StabilityFunction):
        return method
    if isinstance(method, ExplicitScheme):
        return explicit_stability(method)
    if isinstance(method, ImplicitScheme):
        return irk_stability(method.as_tableau())
    if isinstance(method, ButcherTableau):
        return irk_stability(method)
    raise TypeError(f"no stability function for {type(method).__name__}")


def limit_at_minus_infinity(R):
    """``lim R(z)`` as ``z -> -inf``; ``+-math.inf`` when ``deg P > deg Q``."""
    dp, dq = len(R.P) - 1, len(R.Q) - 1
    if dp < dq:
        return 0.0
    ratio = R.P[-1] / R.Q[-1]
    if dp == dq:
        return float(ratio)
    return math.copysign(math.inf, ratio * (-1.0) ** (dp - dq))


@dataclass(frozen=True)
class AStabilityReport:
    a_stable: bool
    max_abs_imag_axis: float
    argmax_imag_axis: float
    max_abs_left_grid: float
    poles: np.ndarray
    left_poles: bool

    def __bool__(self):
        return self.a_stable


IMAG_AXIS_SAMPLES = np.logspace(-3, 6, 4000)
A_STABILITY_TOL = 1e-9


def a_stability_check(R, tol=A_STABILITY_TOL):
    """Decide A-stability by imaginary-axis sampling plus pole location.

    Coefficients are real, so ``|R(-iy)| = |R(iy)|`` and only ``y > 0`` is
    sampled.  A left-half-plane grid is checked as well.
    """
    y = IMAG_AXIS_SAMPLES
    vals = np.abs(R(1j * y))
    i = int(np.argmax(vals))
    re = -np.logspace(-3, 4, 60)
    im = np.concatenate((-np.logspace(-3, 4, 40)[::-1], [0.0], np.logspace(-3, 4, 40)))
    grid = re[:, None] + 1j * im[None, :]
    left_max = float(np.max(np.abs(R(grid))))
    poles = npoly.polyroots(R.Q) if len(R.Q) > 1 else np.array([], dtype=complex)
    left_poles = bool(np.any(poles.real <= 0.0))
    bounded = len(R.P) <= len(R.Q)
    ok = bounded and not left_poles and vals[i] <= 1.0 + tol and left_max <= 1.0 + tol
    return AStabilityReport(bool(ok), float(vals[i]), float(y[i]), left_max, poles, left_poles)


def is_l_stable(R):
    return bool(a_stability_check(R)) and limit_at_minus_infinity(R) == 0.0


def real_axis_interval(R, bracket=1e6, tol=1e-10):
    """Stable interval ``[left, 0]`` of the negative real axis containing ``0-``.

    ``left`` is ``-inf`` when ``|R| <= 1`` everywhere on ``[-bracket, 0]``
    sampled on a logarithmic grid.
    """
    stable = lambda x: abs(complex(R(x))) <= 1.0 + 1e-12
    xs = -np.logspace(-8, math.log10(bracket), 2000)
    last_ok = 0.0
    for x in xs:
        if not stable(x):
            inside, _ = _bisect(stable, last_ok, x, tol)
            return inside, 0.0
        last_ok = x
    return -math.inf, 0.0


def _bisect(stable, inside, outside, tol):
    while abs(inside - outside) > tol:
        mid = 0.5 * (inside + outside)
        if stable(mid):
            inside = mid
        else:
            outside = mid
    return inside, outside


@dataclass(frozen=True)
class Raster:
    """Boolean stability grid; row 0 is the top (largest imaginary part)."""

    grid: np.ndarray
    re_range: tuple
    im_range: tuple
    real_interval: tuple

    def to_pbm(self):
        rows, cols = self.grid.shape
        lines = ["P1", f"{cols} {rows}"]
        lines += [" ".join("1" if v else "0" for v in row) for row in self.grid]
        return "\n".join(lines) + "\n"


def region_raster(R, re_range, im_range, resolution):
    """Rasterize ``|R(z)| <= 1`` on a ``resolution`` grid (int or ``(nx, ny)``)."""
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    if not (1 <= nx <= 4096 and 1 <= ny <= 4096):
        raise ValueError(f"resolution must be within 1..4096 per axis, got {resolution!r}")
    re = np.linspace(re_range[0], re_range[1], nx)
    im = np.linspace(im_range[1], im_range[0], ny)
    z = re[None, :] + 1j * im[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        grid = np.abs(R(z)) <= 1.0
    return Raster(grid, tuple(re_range), tuple(im_range), real_axis_interval(R))


def _positive_real_roots(c):
    c = _trim(c)
    if len(c) < 2:
        return []
    roots = npoly.polyroots(c)
    return [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0.0]


def monotonicity_threshold(method):
    """Largest ``x = gamma h`` with ``0 < R(-x') < 1`` for all ``0 < x' <= x``.

    Only polynomial (explicit) stability functions are supported.  The
    boundary is the smallest positive root of ``R(-x)`` or ``R(-x) - 1``;
    roots come from the companion matrix and get two Newton polishing steps.
    """
    R = stability_function(method)
    if not R.is_polynomial:
        raise ValueError("monotonicity threshold is defined here for explicit methods only")
    # P(-x) as a polynomial in x
    flip = R.P * (-1.0) ** np.arange(len(R.P))
    minus_one = flip.copy()
    minus_one[0] -= 1.0
    # minus_one has a root at x = 0; strip it
    minus_one = minus_one[1:]
    candidates = [(x, c) for c in (flip, minus_one) for x in _positive_real_roots(c)]
    if not candidates:
        return math.inf
    x, poly = min(candidates, key=lambda pair: pair[0])
    dpoly = npoly.polyder(poly)
    for _ in range(2):
        slope = npoly.polyval(x, dpoly)
        if slope == 0.0:
            break
        x -= npoly.polyval(x, poly) / slope
    return float(x)


def sigma_sign_report(n_max=8):
    """End-row weights of the explicit schemes with their signs, ``n = 1..n_max``."""
    report = {}
    for n in range(1, n_max + 1):
        sigma = build_explicit(n).sigma_out
        report[n] = {"sigma": sigma.tolist(), "negative": int(np.sum(sigma < 0))}
    return report
