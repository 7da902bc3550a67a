"""Weighted exponential polynomials and the two second-degree implicit procedures.

The weighted family ``E^(alpha,beta)_nk`` is orthogonal on the half-line
under ``exp(-alpha t) (1 - exp(-t))^beta``.  It is generated here by a
Rodrigues-type formula in ``x = exp(-t)`` using exact integer arithmetic:

    E_nk(-ln x) = x^(-alpha-k) (1-x)^(-beta) / (n-k)!
                  * d^(n-k)/dx^(n-k) [x^(alpha+n+k) (1-x)^(beta+n-k)]

Choosing ``beta = omega * alpha`` and picking ``alpha`` so that the largest
zero ``gamma_n`` of ``E_n0`` stays at or below one gives rules whose nodes
fit inside a unit step.  For ``n = 2``, ``alpha = beta = 6`` this yields a
three-stage stiffly accurate procedure with positive weights; the unweighted
family with the left end point dropped yields an L-stable two-stage one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, log, sqrt

import numpy as np

from .errors import InternalConsistencyError, NoValidZeroError

__all__ = [
    "ButcherTableau",
    "WeightedExpoPoly",
    "Interpolants",
    "rodrigues_expand",
    "gen_zeros",
    "interpolants_astable2",
    "astable2_tableau",
    "lstable2_tableau",
    "scan_gamma",
    "euler_tableau",
]


@dataclass(frozen=True)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    label: str = ""

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        c = np.array(self.c, dtype=float)
        s = len(b)
        if A.shape != (s, s) or c.shape != (s,):
            raise ValueError(f"inconsistent tableau shapes A{A.shape}, b{b.shape}, c{c.shape}")
        for name, arr in (("A", A), ("b", b), ("c", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def stages(self):
        return len(self.b)

    @property
    def is_explicit(self):
        return not np.any(np.triu(self.A))

    @property
    def stiffly_accurate(self):
        return bool(np.array_equal(self.A[-1], self.b)) and self.c[-1] == 1.0

    def consistency_defects(self):
        """Return ``(|sum b - 1|, max |row sums of A - c|)``."""
        return abs(self.b.sum() - 1.0), float(np.max(np.abs(self.A.sum(axis=1) - self.c)))


def euler_tableau():
    return ButcherTableau(A=[[0.0]], b=[1.0], c=[0.0], label="euler")


@dataclass(frozen=True)
class WeightedExpoPoly:
    """``E^(alpha,beta)_nk`` as a polynomial in ``x = exp(-t)``.

    ``coeffs[i]`` is the exact rational coefficient of ``x**i``.
    """

    n: int
    k: int
    alpha: int
    beta: int
    coeffs: tuple = field(repr=False)

    def in_x(self, x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def __call__(self, t):
        return self.in_x(np.exp(-np.asarray(t, dtype=float)))


def _divide_by_one_minus_x(p):
    # p = (1 - x) q  =>  q_i = sum_{m <= i} p_m, and the full sum must vanish
    q = []
    acc = 0
    for coef in p[:-1]:
        acc += coef
        q.append(acc)
    if acc + p[-1] != 0:
        raise InternalConsistencyError("Rodrigues expansion is not divisible by (1 - x)")
    return q


def rodrigues_expand(n, k, alpha, beta):
    for name, v in (("n", n), ("k", k), ("alpha", alpha), ("beta", beta)):
        if not isinstance(v, (int, np.integer)) or v < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
    if not 0 <= k <= n:
        raise IndexError(f"k={k} outside 0..{n}")
    if n > 8:
        raise ValueError(f"Rodrigues expansion supports n <= 8, got {n}")

    m = beta + n - k
    low = alpha + n + k
    p = [0] * low + [comb(m, i) * (-1) ** i for i in range(m + 1)]
    for _ in range(n - k):
        p = [i * p[i] for i in range(1, len(p))]
    shift = alpha + k
    if any(p[:shift]):
        raise InternalConsistencyError("negative power of x survived the Rodrigues expansion")
    p = p[shift:]
    for _ in range(beta):
        p = _divide_by_one_minus_x(p)
    scale = factorial(n - k)
    coeffs = tuple(Fraction(v, scale) for v in p)
    return WeightedExpoPoly(n, k, alpha, beta, coeffs)


def gen_zeros(n, alpha, beta):
    """Zeros of ``E^(alpha,beta)_n0`` as ascending ``t``-values (``n`` is 1 or 2)."""
    if n not in (1, 2):
        raise ValueError(f"gen_zeros is closed-form only for n in (1, 2), got {n!r}")
    c = [float(v) for v in rodrigues_expand(n, 0, alpha, beta).coeffs]
    if n == 1:
        roots = [-c[0] / c[1]]
    else:
        c0, c1, c2 = c
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0:
            raise NoValidZeroError(f"E_20^({alpha},{beta}) has complex zeros")
        sq = sqrt(disc)
        # cancellation-free pair
        q = -0.5 * (c1 + (sq if c1 >= 0 else -sq))
        roots = [q / c2, c0 / q]
    for x in roots:
        if not 0.0 < x < 1.0:
            raise NoValidZeroError(f"zero x={x!r} of E_{n}0^({alpha},{beta}) lies outside (0, 1)")
    return np.sort(-np.log(np.array(roots)))


def scan_gamma(n=2, omega=1, alpha_list=(0, 2, 4, 6, 8)):
    """Largest zero of ``E^(alpha, omega*alpha)_n0`` for each ``alpha``.

    Purely a report: no claim is made about which ``alpha`` is optimal.
    """
    out = []
    for alpha in alpha_list:
        beta = Fraction(omega) * alpha
        if beta.denominator != 1:
            raise ValueError(f"omega*alpha must be an integer, got {beta} for alpha={alpha}")
        out.append((alpha, float(gen_zeros(n, int(alpha), int(beta))[-1])))
    return out


# Constants of the second-degree weighted rule (alpha = beta = 6).
_R15 = sqrt(15.0)
GAMMA2 = log((15.0 + _R15) / 7.0)
MU1_ASTABLE = log((8.0 + _R15) / 7.0)
NU1_ASTABLE = 1.0 - MU1_ASTABLE / GAMMA2


@dataclass(frozen=True)
class Interpolants:
    """Three functions ``e_i(t) = c_i0 + c_i1 exp(-g t) + c_i2 exp(-2 g t)``."""

    gamma: float
    nodes: np.ndarray
    coeffs: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        x = np.exp(-self.gamma * t)
        basis = np.stack([np.ones_like(x), x, x * x])
        return np.tensordot(self.coeffs, basis, axes=1)

    def integrals(self, upper):
        """``int_0^upper e_i(t) dt`` for each interpolant."""
        g = self.gamma
        I = np.array([upper, (1 - np.exp(-g * upper)) / g, (1 - np.exp(-2 * g * upper)) / (2 * g)])
        return self.coeffs @ I


def interpolants_astable2():
    r = _R15
    coeffs = np.array(
        [
            [1.0, -30.0 / 7.0, 30.0 / 7.0],
            [-r, (15.0 + 22.0 * r) / 7.0, -(15.0 + 15.0 * r) / 7.0],
            [r, (15.0 - 22.0 * r) / 7.0, -(15.0 - 15.0 * r) / 7.0],
        ]
    )
    return Interpolants(GAMMA2, np.array([0.0, NU1_ASTABLE, 1.0]), coeffs)


def astable2_tableau():
    g = GAMMA2
    nu1 = NU1_ASTABLE
    r = _R15
    q = (8.0 + r) / 14.0
    q_hat = (8.0 - r) / 14.0
    s = 3.0 * (1.0 + r) / 4.0
    s_hat = 3.0 * (1.0 - r) / 4.0
    last = [1.0 - q / g, -r + (q + s) / g, r - s / g]
    A = [
        [0.0, 0.0, 0.0],
        [nu1 - q_hat / g, -r * nu1 - s_hat / g, r * nu1 + (q_hat + s_hat) / g],
        last,
    ]
    return ButcherTableau(A=A, b=last, c=[0.0, nu1, 1.0], label="astable2")


# Constants of the second-degree unweighted rule without the left end point.
BETA2 = log(3.0 + sqrt(3.0))
MU1_LSTABLE = log(2.0 + sqrt(3.0))
NU1_LSTABLE = 1.0 - MU1_LSTABLE / BETA2
Q_LSTABLE = (3.0 - sqrt(3.0)) / 6.0
R_LSTABLE = sqrt(3.0) / 6.0


def lstable2_tableau():
    b2 = BETA2
    nu1 = NU1_LSTABLE
    q = Q_LSTABLE
    r = R_LSTABLE
    s = q + 2.0 * r
    last = [q + r / b2, s - r / b2]
    A = [[q * nu1 + r / b2, s * nu1 - r / b2], last]
    return ButcherTableau(A=A, b=last, c=[nu1, 1.0], label="lstable2")
