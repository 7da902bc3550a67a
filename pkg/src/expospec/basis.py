"""Orthogonal exponential polynomials on the half-line.

The degree-``n`` system ``E_n1, ..., E_nn`` consists of polynomials in
``x = exp(-t)`` that are orthogonal on ``[0, inf)`` with unit weight.  The
companion polynomial ``E_n0`` has ``n`` simple positive zeros ``lambda_ns``
which, together with weights ``rho_ns``, form a Gauss-type rule for
exponentials.  Nodes and weights come from the Gauss-Legendre rule through
``z = 1 - 2 exp(-lambda)``, ``w = 2 rho exp(-lambda)``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IllConditionedBasisError, InvalidDegreeError

__all__ = [
    "GaussLegendreRule",
    "ExpoBasis",
    "gauss_legendre",
    "build_basis",
    "eval_E",
    "eval_E_all",
    "eval_S",
    "eval_S_derivative",
    "orthogonality_report",
    "closed_form_weights",
]

MAX_GAUSS_NODES = 64
MAX_BASIS_DEGREE = 32
ILL_CONDITIONED_RESIDUAL = 1e-8


@dataclass(frozen=True)
class GaussLegendreRule:
    n: int
    z: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class ExpoBasis:
    """Zeros, weights and nodal values of the degree-``n`` system.

    ``nodal_values[j - 1, s - 1]`` holds ``E_nj(lambda_ns)`` for
    ``j, s = 1..n``.
    """

    n: int
    lam: np.ndarray
    rho: np.ndarray
    nodal_values: np.ndarray

    @property
    def lam_max(self):
        return float(self.lam[-1])


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _legendre_and_derivative(n, x):
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Gauss-Legendre rule with ``n`` nodes on ``[-1, 1]``.

    Newton iteration on the three-term Legendre recurrence, started from
    Tricomi's asymptotic guesses.  Nodes are returned ascending and are
    symmetrized exactly.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_GAUSS_NODES:
        raise InvalidDegreeError(f"Gauss-Legendre node count must be in 1..{MAX_GAUSS_NODES}, got {n!r}")
    n = int(n)
    if n == 1:
        return GaussLegendreRule(1, _readonly([0.0]), _readonly([2.0]))

    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    # one more sweep at the converged nodes for the derivative
    p, dp = _legendre_and_derivative(n, x)
    x = x - p / dp
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    z = x[::-1]
    w = w[::-1]
    z = 0.5 * (z - z[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2:
        z[n // 2] = 0.0
    return GaussLegendreRule(n, _readonly(z), _readonly(w))


def _check_degree(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDegreeError(f"degree must be a positive integer, got {n!r}")


def eval_E_all(n, t):
    """All of ``E_n0(t), ..., E_nn(t)`` by the downward recurrence.

    Returns an array of shape ``(n + 1,) + np.shape(t)``.
    """
    _check_degree(n)
    t = np.asarray(t, dtype=float)
    x = np.exp(-t)
    et = np.exp(t)
    out = np.empty((n + 1,) + t.shape)
    out[n] = x**n
    out[n - 1] = (2 * n - 1) * x ** (n - 1) - 2 * n * x**n
    for j in range(n - 1, 0, -1):
        a = (2 * j + 1) * (n + j) * (n - j + 1)
        b = (2 * j - 1) * 2 * j * (2 * j + 1)
        c = 4 * j * (n * n + j * j + n)
        d = (2 * j - 1) * (n - j) * (n + j + 1)
        with np.errstate(invalid="ignore"):
            # exp(t) * E_nj is finite; inf * 0 only occurs past underflow
            prod = np.where(out[j] == 0.0, 0.0, b * et * out[j])
        out[j - 1] = (prod - c * out[j] - d * out[j + 1]) / a
    return out


def eval_E(n, j, t):
    """``E_nj(t)`` for ``0 <= j <= n``; ``t`` may be an array."""
    _check_degree(n)
    if not 0 <= j <= n:
        raise IndexError(f"index j={j} outside 0..{n}")
    return eval_E_all(n, t)[j]


def _check_S_args(n, j, beta):
    _check_degree(n)
    if not 1 <= j <= n:
        raise IndexError(f"S_nj is defined for 1 <= j <= n, got j={j}, n={n}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta!r}")


def eval_S(n, j, beta, t):
    """Antiderivative ``S_nj(beta, t) = int_0^t E_nj(beta s) ds`` in closed form."""
    _check_S_args(n, j, beta)
    E = eval_E_all(n, beta * np.asarray(t, dtype=float))
    tail = E[j + 1 :].sum(axis=0)
    return (1.0 - E[j] - 2.0 * tail) / (beta * j)


def eval_S_derivative(n, j, beta, t):
    """Derivative of :func:`eval_S` in ``t``, i.e. ``E_nj(beta t)``."""
    _check_S_args(n, j, beta)
    return eval_E_all(n, beta * np.asarray(t, dtype=float))[j]


def _residuals(lam, rho, nodal):
    n = len(lam)
    idx = np.arange(1, n + 1)
    gram = (nodal * rho) @ nodal.T
    target = np.diag(1.0 / (2.0 * idx))
    orth = float(np.max(np.abs(gram - target)))
    integ = float(np.max(np.abs(nodal @ rho - 1.0 / idx)))
    return orth, integ


@lru_cache(maxsize=None)
def build_basis(n):
    """Build the degree-``n`` exponential basis (``1 <= n <= 32``).

    Raises
    ------
    IllConditionedBasisError
        If the discrete orthogonality residual exceeds ``1e-8``.
    """
    _check_degree(n)
    if n > MAX_BASIS_DEGREE:
        raise InvalidDegreeError(f"basis degree must be at most {MAX_BASIS_DEGREE}, got {n}")
    rule = gauss_legendre(n)
    one_minus_z = 1.0 - rule.z
    lam = -np.log(one_minus_z / 2.0)
    rho = rule.w / one_minus_z
    nodal = eval_E_all(n, lam)[1:]
    orth, integ = _residuals(lam, rho, nodal)
    worst = max(orth, integ)
    if not worst <= ILL_CONDITIONED_RESIDUAL:
        raise IllConditionedBasisError(n, worst)
    return ExpoBasis(n, _readonly(lam), _readonly(rho), _readonly(nodal))


def orthogonality_report(n):
    """Return ``(orthogonality residual, integral-identity residual)``.

    The first is ``max |sum_s rho_s E_j E_l - delta_jl/(j+l)|`` over all
    ``j, l``, the second ``max |sum_s rho_s E_l - 1/l|``.
    """
    b = build_basis(n)
    return _residuals(b.lam, b.rho, b.nodal_values)


def closed_form_weights(basis):
    """Weights recomputed as ``1 / (2 sum_m m E_nm(lambda)^2)`` (cross-check only)."""
    m = np.arange(1, basis.n + 1)[:, None]
    return 1.0 / (2.0 * np.sum(m * basis.nodal_values**2, axis=0))
