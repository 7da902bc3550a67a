"""Coefficient tables for the implicit collocation scheme and the explicit recurrence.

Stage functions (``Q``, ``G``, ``R``) are kept as coefficient rows over the
mixed basis ``{t, S_k1(beta, t), ..., S_kk(beta, t)}`` so that values and
derivatives are exact linear combinations of closed-form functions.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import build_basis, eval_E_all
from .errors import InvalidDegreeError
from .genmethods import ButcherTableau

__all__ = [
    "MixedExpansion",
    "ImplicitScheme",
    "ExplicitScheme",
    "coupling_matrix",
    "q_functions",
    "build_implicit",
    "build_explicit",
]


@dataclass(frozen=True)
class MixedExpansion:
    """Rows of coefficients over ``{t, S_k1(beta, .), ..., S_kk(beta, .)}``.

    ``coeffs`` has shape ``(m, k + 1)``; column 0 multiplies ``t``.
    ``k = 0`` means the plain basis ``{t}``.
    """

    k: int
    beta: float
    coeffs: np.ndarray

    def _S_and_E(self, t):
        t = float(t)
        if self.k == 0:
            return np.array([t]), np.array([1.0])
        E = eval_E_all(self.k, self.beta * t)
        # S_kj = (1 - E_kj - 2 sum_{l>j} E_kl) / (beta j)
        tails = np.cumsum(E[:0:-1])[::-1]  # tails[j-1] = sum_{l>=j} E_kl
        tail_after = np.append(tails[1:], 0.0)
        j = np.arange(1, self.k + 1)
        S = (1.0 - E[1:] - 2.0 * tail_after) / (self.beta * j)
        return np.concatenate(([t], S)), np.concatenate(([1.0], E[1:]))

    def value(self, t):
        basis_vals, _ = self._S_and_E(t)
        return self.coeffs @ basis_vals

    def derivative(self, t):
        _, deriv_vals = self._S_and_E(t)
        return self.coeffs @ deriv_vals


def coupling_matrix(k):
    """The inverse-Gram coupling ``A_jl`` (``2(-1)^l`` off the diagonal, ``-1``/``3`` on it)."""
    j = np.arange(1, k + 1)
    A = np.tile(2.0 * (-1.0) ** j, (k, 1))
    A[np.diag_indices(k)] = np.where(j % 2 == 1, -1.0, 3.0)
    return A


def q_functions(basis, beta=1.0):
    """Coefficient rows of ``Q_k0, Q_k1, ..., Q_kk`` for ``k = basis.n``.

    Row 0 is ``Q_k0``; row ``s`` is ``Q_ks``.  The coefficients do not
    depend on ``beta``; it only fixes where the expansion is evaluated.
    """
    k = basis.n
    sign = (-1.0) ** k
    Q = np.zeros((k + 1, k + 1))
    Q[0, 0] = sign
    Q[0, 1:] = -2.0 * sign
    A = coupling_matrix(k)
    l = np.arange(1, k + 1)
    weighted = 2.0 * basis.rho[None, :] * (l[:, None] * basis.nodal_values)  # (l, s)
    Q[1:, 1:] = (A @ weighted).T
    Q[1:, 0] = -(weighted * ((-1.0) ** l)[:, None]).sum(axis=0)
    return MixedExpansion(k, float(beta), Q)


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 32:
        raise InvalidDegreeError(f"scheme degree must be in 1..32, got {n!r}")


@dataclass(frozen=True)
class ImplicitScheme:
    """Collocation scheme: ``Y_p = Y + h sigma0[p] F_0 + h sum_s sigma[p, s] F_s``."""

    n: int
    nu: np.ndarray
    sigma0: np.ndarray
    sigma: np.ndarray

    def as_tableau(self):
        s = self.n + 1
        A = np.zeros((s, s))
        A[1:, 0] = self.sigma0
        A[1:, 1:] = self.sigma
        c = np.concatenate(([0.0], self.nu))
        return ButcherTableau(A=A, b=A[-1].copy(), c=c, label=f"implicit{self.n}")


@dataclass(frozen=True)
class ExplicitScheme:
    """Explicit recurrence scheme of degree ``n`` (``n + 1`` stages).

    ``mu`` is stored as an ``(n + 1) x (n + 1)`` strictly lower-triangular
    array: row ``p`` holds the weights of ``K_0..K_{p-1}`` in stage ``p``
    (row 0 is empty).  ``dense[r]`` expresses ``R_nr`` over
    ``{t, S_n1(1, .), ..., S_nn(1, .)}``; ``levels[k]`` holds all ``R_kr``
    of recurrence level ``k``.
    """

    n: int
    nu: np.ndarray
    mu: np.ndarray
    sigma_out: np.ndarray
    dense: np.ndarray
    lam_max: float
    levels: tuple

    @property
    def c(self):
        return np.concatenate(([0.0], self.nu))

    @property
    def stages(self):
        return self.n + 1

    def as_tableau(self):
        return ButcherTableau(A=self.mu.copy(), b=self.sigma_out.copy(), c=self.c, label=f"explicit{self.n}")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def build_implicit(n):
    _check_n(n)
    basis = build_basis(n)
    Q = q_functions(basis)
    lam_max = basis.lam_max
    vals = np.array([Q.value(t) for t in basis.lam]) / lam_max  # (p, r)
    return ImplicitScheme(
        n=n,
        nu=_frozen(basis.lam / lam_max),
        sigma0=_frozen(vals[:, 0]),
        sigma=_frozen(vals[:, 1:]),
    )


@lru_cache(maxsize=None)
def build_explicit(n):
    """Run the level-by-level recurrence and collect the Runge-formula tables.

    Level ``k`` lives on ``[0, lambda_nk]`` with ``beta_k = lambda_kk /
    lambda_nk`` and collocation points ``t_ks = lambda_ks / beta_k``.  The
    stage for level ``k`` evaluates the level ``k - 1`` expansion at
    ``t_kk``; derivative matching at ``t_ks, s < k`` couples the levels.
    """
    _check_n(n)
    lam_n = build_basis(n).lam
    lam_max = float(lam_n[-1])
    mu = np.zeros((n + 1, n + 1))
    nu = np.zeros(n)
    prev = MixedExpansion(0, 1.0, np.array([[1.0]]))  # R_00(t) = t
    levels = [prev]
    for k in range(1, n + 1):
        basis_k = build_basis(k)
        beta = basis_k.lam_max / lam_n[k - 1]
        t_k = basis_k.lam / beta
        t_kk = float(lam_n[k - 1])
        mu[k, :k] = prev.value(t_kk) / lam_max
        nu[k - 1] = t_kk / lam_max
        Q = q_functions(basis_k, beta).coeffs
        if k == 1:
            R = Q.copy()
        else:
            gamma = np.array([prev.derivative(t) for t in t_k[:-1]])  # (s, r)
            G = gamma.T @ Q[1:k]  # rows r = 0..k-1
            R = np.empty((k + 1, k + 1))
            R[0] = Q[0] + G[0]
            R[1:k] = G[1:]
            R[k] = Q[k]
        prev = MixedExpansion(k, float(beta), R)
        levels.append(prev)
    sigma_out = prev.value(lam_max) / lam_max
    return ExplicitScheme(
        n=n,
        nu=_frozen(nu),
        mu=_frozen(mu),
        sigma_out=_frozen(sigma_out),
        dense=_frozen(prev.coeffs),
        lam_max=lam_max,
        levels=tuple(levels),
    )
