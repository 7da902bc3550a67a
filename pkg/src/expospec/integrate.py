"""Steppers and drivers: explicit Runge formulas, dense output, implicit solves.

Explicit steps follow

    K_0 = h F(T, Y)
    K_p = h F(T + nu_p h, Y + sum_{s<p} mu_ps K_s),   p = 1..n
    Y(T + h) = Y + sum_s sigma_s K_s

Implicit steps solve the stage equations of a Butcher tableau with a
simplified Newton iteration (forward-difference Jacobian, frozen within the
step and refreshed when the residual stops contracting).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NewtonDivergenceError, NonFiniteStateError, StepSizeUnderflowError
from .genmethods import ButcherTableau
from .schemes import ExplicitScheme, ImplicitScheme, build_explicit

__all__ = [
    "OdeProblem",
    "StepResult",
    "Stats",
    "Trajectory",
    "AdaptiveConfig",
    "NewtonOptions",
    "ExtrapolationWarning",
    "explicit_step",
    "dense_eval",
    "solve_fixed",
    "solve_adaptive",
    "implicit_step",
    "irk_step",
]


class ExtrapolationWarning(UserWarning):
    """Dense output requested outside the completed step."""


@dataclass(frozen=True)
class OdeProblem:
    rhs: object
    t_initial: float
    t_final: float
    y_initial: np.ndarray
    name: str = ""

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y_initial, dtype=float)).copy()
        y0.setflags(write=False)
        object.__setattr__(self, "y_initial", y0)
        if not self.t_final > self.t_initial:
            raise ValueError(f"t_final ({self.t_final}) must exceed t_initial ({self.t_initial})")

    @property
    def dimension(self):
        return self.y_initial.size


@dataclass
class StepResult:
    y_end: np.ndarray
    stages: np.ndarray
    h: float
    newton_iterations: int = 0
    rhs_evals: int = 0


@dataclass
class Stats:
    rhs_evals: int = 0
    accepted: int = 0
    rejected: int = 0
    newton_iterations: int = 0
    step_changes: int = 0

    def summary(self):
        return (
            f"rhs_evals={self.rhs_evals} accepted={self.accepted} rejected={self.rejected} "
            f"newton_iterations={self.newton_iterations} step_changes={self.step_changes}"
        )


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    stats: Stats = field(default_factory=Stats)
    t_eval: np.ndarray = None
    y_eval: np.ndarray = None

    @property
    def t_end(self):
        return float(self.times[-1])

    @property
    def y_end(self):
        return self.states[-1]


@dataclass(frozen=True)
class AdaptiveConfig:
    rtol: float = 1e-6
    atol: float = 1e-6
    h_initial: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 1.0
    safety: float = 0.9
    order_exponent: float = 0.5

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if not 0 < self.h_min <= self.h_initial <= self.h_max:
            raise ValueError("need 0 < h_min <= h_initial <= h_max")
        if not 0 < self.safety < 1:
            raise ValueError("safety must lie in (0, 1)")
        if not self.order_exponent > 0:
            raise ValueError("order_exponent must be positive")


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 50


def _eval_rhs(problem, t, y, stage):
    f = np.asarray(problem.rhs(t, y), dtype=float)
    if not np.all(np.isfinite(f)):
        raise NonFiniteStateError(stage, t)
    return f


def _check_h(h):
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h!r}")


def explicit_step(scheme, problem, T, Y, h):
    """One step of the explicit scheme; exactly ``n + 1`` rhs evaluations."""
    _check_h(h)
    Y = np.asarray(Y, dtype=float)
    K = np.empty((scheme.stages, Y.size))
    K[0] = h * _eval_rhs(problem, T, Y, 0)
    for p in range(1, scheme.stages):
        arg = Y.copy()
        for s in range(p):
            arg += scheme.mu[p, s] * K[s]
        K[p] = h * _eval_rhs(problem, T + scheme.nu[p - 1] * h, arg, p)
    y_end = Y.copy()
    for s in range(scheme.stages):
        y_end += scheme.sigma_out[s] * K[s]
    return StepResult(y_end, K, h, rhs_evals=scheme.stages)


def dense_eval(scheme, step, T, Y, theta, level=None):
    """Continuous approximation inside (or, with a warning, beyond) a step.

    Evaluates ``Y + f_0 R_k0(t) + sum_r g_r R_kr(t)`` at ``t = theta *
    lambda_nn`` with ``f = K / lambda_nn``.  ``level`` defaults to ``n``;
    level ``p - 1`` at ``theta = nu_p`` gives back the argument of stage
    ``p``.
    """
    if not 0.0 <= theta <= 1.0:
        warnings.warn(f"dense output at theta={theta} extrapolates beyond the step", ExtrapolationWarning, stacklevel=2)
    k = scheme.n if level is None else level
    if not 0 <= k <= scheme.n:
        raise IndexError(f"level {k} outside 0..{scheme.n}")
    weights = scheme.levels[k].value(theta * scheme.lam_max) / scheme.lam_max
    Y = np.asarray(Y, dtype=float)
    return Y + weights @ step.stages[: k + 1]


def _fixed_mesh(t0, t1, h):
    n_full = int(np.floor((t1 - t0) / h * (1 + 1e-12)))
    times = t0 + h * np.arange(n_full + 1)
    if t1 - times[-1] > 1e-12 * max(1.0, abs(t1)):
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


def _stepper_for(method):
    if isinstance(method, ExplicitScheme):
        return lambda p, T, Y, h, _: explicit_step(method, p, T, Y, h)
    if isinstance(method, ImplicitScheme):
        return lambda p, T, Y, h, nw: implicit_step(method, p, T, Y, h, nw)
    if isinstance(method, ButcherTableau):
        return lambda p, T, Y, h, nw: irk_step(method, p, T, Y, h, nw)
    raise TypeError(f"cannot step with {type(method).__name__}")


def solve_fixed(problem, scheme, h, newton=None):
    """Fixed-step integration over ``[t_initial, t_final]``; the last step lands on ``t_final``.

    ``scheme`` may be an explicit or implicit scheme or a Butcher tableau.
    """
    _check_h(h)
    newton = newton or NewtonOptions()
    step_fn = _stepper_for(scheme)
    times = _fixed_mesh(problem.t_initial, problem.t_final, h)
    states = np.empty((len(times), problem.dimension))
    states[0] = problem.y_initial
    stats = Stats()
    for i in range(len(times) - 1):
        step = step_fn(problem, times[i], states[i], times[i + 1] - times[i], newton)
        states[i + 1] = step.y_end
        stats.accepted += 1
        stats.newton_iterations += step.newton_iterations
        stats.rhs_evals += step.rhs_evals
    return Trajectory(times, states, stats)


def _embedded_pair(scheme_hi, scheme_lo, problem, T, Y, h):
    hi = explicit_step(scheme_hi, problem, T, Y, h)
    # degree n-1 shares K_0 only
    K = np.empty((scheme_lo.stages, Y.size))
    K[0] = hi.stages[0]
    for p in range(1, scheme_lo.stages):
        arg = Y.copy()
        for s in range(p):
            arg += scheme_lo.mu[p, s] * K[s]
        K[p] = h * _eval_rhs(problem, T + scheme_lo.nu[p - 1] * h, arg, p)
    y_lo = Y.copy()
    for s in range(scheme_lo.stages):
        y_lo += scheme_lo.sigma_out[s] * K[s]
    return hi, y_lo


def solve_adaptive(problem, n, config=None, t_eval=None):
    """Adaptive integration comparing degree ``n`` against degree ``n - 1``.

    The error estimate is the max-norm of ``(y_n - y_{n-1}) / (atol + rtol
    |y_n|)``; steps with estimate ``<= 1`` are accepted and advance with
    ``y_n``.  Each attempt costs ``2n`` rhs evaluations.  ``t_eval``
    requests dense output at the given times.
    """
    if n < 2:
        raise ValueError("adaptive stepping needs n >= 2 for the degree n-1 comparison")
    config = config or AdaptiveConfig()
    hi_scheme, lo_scheme = build_explicit(n), build_explicit(n - 1)
    t0, t1 = problem.t_initial, problem.t_final
    T, Y = t0, problem.y_initial.copy()
    h = min(config.h_initial, t1 - t0)
    times, states = [T], [Y.copy()]
    stats = Stats()
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        y_eval = np.full((len(t_eval), problem.dimension), np.nan)
        y_eval[t_eval == t0] = Y
    while T < t1:
        h_try = min(h, t1 - T)
        last = h_try == t1 - T
        step, y_lo = _embedded_pair(hi_scheme, lo_scheme, problem, T, Y, h_try)
        stats.rhs_evals += hi_scheme.stages + lo_scheme.stages - 1
        scale = config.atol + config.rtol * np.abs(step.y_end)
        est = float(np.max(np.abs(step.y_end - y_lo) / scale))
        factor = 5.0 if est == 0.0 else min(5.0, max(0.2, config.safety * est ** (-config.order_exponent)))
        h_new = min(config.h_max, max(config.h_min, h_try * factor))
        if est <= 1.0:
            T_next = t1 if last else T + h_try
            if t_eval is not None:
                inside = (t_eval > T) & (t_eval <= T_next)
                for idx in np.flatnonzero(inside):
                    theta = (t_eval[idx] - T) / h_try
                    y_eval[idx] = dense_eval(hi_scheme, step, T, Y, min(theta, 1.0))
            T, Y = T_next, step.y_end
            times.append(T)
            states.append(Y.copy())
            stats.accepted += 1
        else:
            if h_try <= config.h_min:
                raise StepSizeUnderflowError(T, h_try)
            stats.rejected += 1
        if h_new != h:
            stats.step_changes += 1
        h = h_new
    traj = Trajectory(np.array(times), np.array(states), stats)
    if t_eval is not None:
        traj.t_eval, traj.y_eval = t_eval, y_eval
    return traj


def _fd_jacobian(problem, t, y, f0):
    n = y.size
    J = np.empty((n, n))
    eps = np.sqrt(np.finfo(float).eps)
    for i in range(n):
        delta = eps * max(1.0, abs(y[i]))
        yp = y.copy()
        yp[i] += delta
        J[:, i] = (np.asarray(problem.rhs(t, yp), dtype=float) - f0) / delta
    return J


def irk_step(tableau, problem, T, Y, h, newton=None):
    """One Runge-Kutta step for a general tableau.

    Leading stages that depend only on earlier stages are computed
    explicitly (so an explicit tableau reproduces :func:`explicit_step`
    exactly); the remaining stages are solved together by Newton's method
    with initial guess ``Y``.  Stiffly accurate tableaux return the last
    stage value.
    """
    _check_h(h)
    newton = newton or NewtonOptions()
    if abs(tableau.b.sum() - 1.0) > 1e-12:
        raise ValueError(f"tableau weights sum to {tableau.b.sum()!r}, not 1")
    A, c = tableau.A, tableau.c
    s = tableau.stages
    Y = np.asarray(Y, dtype=float)
    N = Y.size
    K = np.zeros((s, N))
    evals = 0

    first_implicit = s
    for i in range(s):
        if np.any(A[i, i:]):
            first_implicit = i
            break
        arg = Y.copy()
        for j in range(i):
            arg += A[i, j] * K[j]
        K[i] = h * _eval_rhs(problem, T + c[i] * h, arg, i)
        evals += 1

    iterations = 0
    Z = None
    if first_implicit < s:
        idx = np.arange(first_implicit, s)
        m = len(idx)
        base = np.tile(Y, (m, 1))
        for r, i in enumerate(idx):
            for j in range(first_implicit):
                base[r] += A[i, j] * K[j]
        A_imp = A[np.ix_(idx, idx)]
        Z = base.copy()

        def stage_f(Z):
            nonlocal evals
            F = np.empty((m, N))
            for r, i in enumerate(idx):
                F[r] = _eval_rhs(problem, T + c[i] * h, Z[r], i)
            evals += m
            return F

        def residual(Z, F):
            return (Z - base - h * (A_imp @ F)).ravel()

        def factor(Z, F):
            nonlocal evals
            M = np.eye(m * N)
            for r, i in enumerate(idx):
                J = _fd_jacobian(problem, T + c[i] * h, Z[r], F[r])
                evals += N
                for q in range(m):
                    M[q * N : (q + 1) * N, r * N : (r + 1) * N] -= h * A_imp[q, r] * J
            return scipy.linalg.lu_factor(M)

        F = stage_f(Z)
        G = residual(Z, F)
        lu = factor(Z, F)
        g_norm = np.max(np.abs(G))
        while True:
            iterations += 1
            dZ = scipy.linalg.lu_solve(lu, -G).reshape(m, N)
            Z = Z + dZ
            update = float(np.max(np.abs(dZ)))
            if not np.all(np.isfinite(Z)):
                raise NewtonDivergenceError(float("inf"), iterations)
            F = stage_f(Z)
            if update <= newton.tol:
                break
            if iterations >= newton.max_iter:
                raise NewtonDivergenceError(float(np.max(np.abs(residual(Z, F)))), iterations)
            G = residual(Z, F)
            g_new = np.max(np.abs(G))
            if g_new > 0.5 * g_norm:
                lu = factor(Z, F)
            g_norm = g_new
        K[first_implicit:] = h * F

    if tableau.stiffly_accurate and Z is not None:
        y_end = Z[-1].copy()
    else:
        y_end = Y.copy()
        for j in range(s):
            y_end += tableau.b[j] * K[j]
    return StepResult(y_end, K, h, iterations, evals)


def implicit_step(scheme, problem, T, Y, h, newton=None):
    """Step of the collocation scheme; the last collocation state is the output."""
    return irk_step(scheme.as_tableau(), problem, T, Y, h, newton)
