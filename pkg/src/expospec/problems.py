"""Test problems and the high-accuracy reference solver used as an oracle."""

from dataclasses import dataclass

import numpy as np

from .errors import FiniteTimeBlowupError, UnknownProblemError
from .integrate import OdeProblem, Stats, Trajectory

__all__ = ["NamedProblem", "NUMERICAL", "catalog", "get_problem", "reference_solve", "problem_names"]

NUMERICAL = "numerical"


@dataclass(frozen=True)
class NamedProblem:
    name: str
    problem: OdeProblem
    reference: object  # callable T -> state, or NUMERICAL
    description: str = ""

    @property
    def has_closed_form(self):
        return callable(self.reference)


def _decay(gamma=1.0, t_final=1.0):
    return NamedProblem(
        "decay" if gamma == 1.0 else "decay_gamma",
        OdeProblem(lambda t, y: -gamma * y, 0.0, t_final, [1.0]),
        lambda t: np.array([np.exp(-gamma * t)]),
        f"y' = -{gamma:g} y, y(0) = 1",
    )


def _harmonic(periods=1):
    return NamedProblem(
        "harmonic",
        OdeProblem(lambda t, y: np.array([y[1], -y[0]]), 0.0, 2 * np.pi * periods, [1.0, 0.0]),
        lambda t: np.array([np.cos(t), -np.sin(t)]),
        "y'' = -y written as a first-order system",
    )


def _vanderpol(mu=5.0, t_final=20.0):
    def rhs(t, y):
        return np.array([y[1], mu * (1.0 - y[0] ** 2) * y[1] - y[0]])

    return NamedProblem("vanderpol", OdeProblem(rhs, 0.0, t_final, [2.0, 0.0]), NUMERICAL, f"Van der Pol, mu={mu:g}")


def _lorenz(sigma=10.0, rho=28.0, beta=8.0 / 3.0, t_final=2.0):
    def rhs(t, y):
        return np.array([sigma * (y[1] - y[0]), y[0] * (rho - y[2]) - y[1], y[0] * y[1] - beta * y[2]])

    return NamedProblem("lorenz", OdeProblem(rhs, 0.0, t_final, [1.0, 1.0, 1.0]), NUMERICAL, "Lorenz system")


def _prothero(L=-1e4, t_final=1.0):
    if not L < 0:
        raise ValueError("Prothero-Robinson stiffness parameter must be negative")
    return NamedProblem(
        "prothero",
        OdeProblem(lambda t, y: L * (y - np.cos(t)) - np.sin(t), 0.0, t_final, [1.0]),
        lambda t: np.array([np.cos(t)]),
        f"y' = {L:g} (y - cos T) - sin T",
    )


def _riccati(t_final=2.0):
    return NamedProblem(
        "riccati",
        OdeProblem(lambda t, y: y * y, 0.0, t_final, [1.0]),
        lambda t: np.array([1.0 / (1.0 - t)]),
        "y' = y^2, y(0) = 1; blows up at T = 1",
    )


def _zero(t_final=1.0):
    return NamedProblem(
        "zero",
        OdeProblem(lambda t, y: np.zeros_like(y), 0.0, t_final, [1.0]),
        lambda t: np.array([1.0]),
        "y' = 0",
    )


_FACTORIES = {
    "decay": lambda **kw: _decay(1.0, **kw),
    "decay_gamma": lambda gamma=10.0, **kw: _decay(gamma, **kw),
    "harmonic": _harmonic,
    "vanderpol": _vanderpol,
    "lorenz": _lorenz,
    "prothero": _prothero,
    "riccati": _riccati,
    "zero": _zero,
}


def problem_names():
    return list(_FACTORIES)


def get_problem(name, **params):
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise UnknownProblemError(f"unknown problem {name!r}; choose from {', '.join(_FACTORIES)}") from None
    named = factory(**params)
    if named.name != name:
        named = NamedProblem(name, named.problem, named.reference, named.description)
    return named


def catalog():
    """Every problem with default parameters."""
    return [get_problem(name) for name in _FACTORIES]


# Dormand-Prince 5(4)
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def reference_solve(problem, rtol=1e-11, atol=None, t_eval=None):
    """Adaptive Dormand-Prince 5(4) integration used as the accuracy oracle.

    Steps are shortened to land exactly on every requested ``t_eval``.

    Raises
    ------
    FiniteTimeBlowupError
        When the step size collapses or the state stops being finite.
    """
    if not rtol >= 1e-13:
        raise ValueError(f"rtol must be at least 1e-13, got {rtol!r}")
    if isinstance(problem, NamedProblem):
        problem = problem.problem
    atol = rtol if atol is None else atol
    t0, t1 = problem.t_initial, problem.t_final
    stops = np.unique(np.concatenate(([t1], [] if t_eval is None else np.asarray(t_eval, dtype=float))))
    stops = stops[(stops > t0) & (stops <= t1)]
    T, Y = t0, problem.y_initial.astype(float).copy()
    times, states = [T], [Y.copy()]
    stats = Stats()
    f = np.asarray(problem.rhs(T, Y), dtype=float)
    stats.rhs_evals += 1
    h = 0.01 * (t1 - t0) * rtol ** 0.2
    next_stop = 0
    K = np.empty((7, Y.size))
    while next_stop < len(stops):
        target = stops[next_stop]
        h_try = min(h, target - T)
        if h_try < 1e-14 * max(1.0, abs(T)) or not np.all(np.isfinite(Y)):
            raise FiniteTimeBlowupError(T, h_try)
        K[0] = f
        for i in range(1, 7):
            K[i] = problem.rhs(T + _DP_C[i] * h_try, Y + h_try * (np.asarray(_DP_A[i]) @ K[:i]))
        stats.rhs_evals += 6
        y_new = Y + h_try * (_DP_B @ K)
        err_vec = h_try * (_DP_E @ K)
        scale = atol + rtol * np.maximum(np.abs(Y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore"):
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            stats.rejected += 1
            h = 0.2 * h_try
            continue
        if err <= 1.0:
            T = target if h_try == target - T else T + h_try
            Y = y_new
            f = K[6]  # first-same-as-last
            times.append(T)
            states.append(Y.copy())
            stats.accepted += 1
            if T == target:
                next_stop += 1
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            # a step shortened to hit an output time should not shrink h
            h = max(h, h_try * factor) if h_try < h else h_try * factor
        else:
            stats.rejected += 1
            h = h_try * max(0.2, 0.9 * err ** -0.2)
    traj = Trajectory(np.array(times), np.array(states), stats)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        lookup = {t: s for t, s in zip(traj.times, traj.states)}
        traj.t_eval = t_eval
        traj.y_eval = np.array([lookup[t] for t in t_eval])
    return traj
