"""Spectral one-step integrators built on orthogonal exponential polynomials."""

from .basis import ExpoBasis, GaussLegendreRule, build_basis, eval_E, eval_S, eval_S_derivative, gauss_legendre
from .genmethods import ButcherTableau, astable2_tableau, lstable2_tableau, rodrigues_expand
from .integrate import (
    AdaptiveConfig,
    NewtonOptions,
    OdeProblem,
    Trajectory,
    dense_eval,
    explicit_step,
    implicit_step,
    irk_step,
    solve_adaptive,
    solve_fixed,
)
from .schemes import ExplicitScheme, ImplicitScheme, build_explicit, build_implicit
from .stability import StabilityFunction, explicit_stability, irk_stability

__version__ = "0.1.0"
