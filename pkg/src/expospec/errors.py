"""Exception types raised across the package."""


class InvalidDegreeError(ValueError):
    """Degree or node count outside the supported range."""


class IllConditionedBasisError(ArithmeticError):
    def __init__(self, n, residual):
        self.n = n
        self.residual = residual
        super().__init__(
            f"exponential basis of degree {n} is ill-conditioned: "
            f"orthogonality residual {residual:.3e} exceeds 1e-8"
        )


class NonFiniteStateError(ArithmeticError):
    def __init__(self, stage, t=None):
        self.stage = stage
        self.t = t
        where = "" if t is None else f" at T={float(t)!r}"
        super().__init__(f"right-hand side returned a non-finite value in stage {stage}{where}")


class NewtonDivergenceError(ArithmeticError):
    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Newton iteration did not converge after {iterations} iterations "
            f"(last residual norm {residual:.3e})"
        )


class StepSizeUnderflowError(ArithmeticError):
    def __init__(self, t, h):
        self.t = t
        self.h = h
        super().__init__(f"step size {h:.3e} fell below the minimum at T={float(t)!r}")


class FiniteTimeBlowupError(StepSizeUnderflowError):
    """The reference solver could not continue; the solution appears to blow up."""


class NoValidZeroError(ValueError):
    """A weighted exponential polynomial has no zero with x in (0, 1)."""


class InternalConsistencyError(AssertionError):
    """Exact arithmetic produced something that should be impossible."""


class UnknownProblemError(LookupError):
    pass
