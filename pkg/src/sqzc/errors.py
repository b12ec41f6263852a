"""Exception and warning types shared across the solver tiers."""


class SqzcError(Exception):
    """Base class for all package errors."""


class ConfigError(SqzcError, ValueError):
    """Invalid scenario configuration or parameter record."""


class SolverError(SqzcError, RuntimeError):
    """A numerical solve could not produce a trustworthy result."""


class SingularMatrixError(SolverError):
    pass


class UnstableDriftError(SolverError):
    """Drift matrix has an eigenvalue with non-negative real part."""


class AboveThresholdError(UnstableDriftError):
    """Linearised dynamics above an oscillation threshold.

    ``which`` names the threshold that was crossed: ``"parametric"`` for
    the amplifier (eps1 >= kappa1/2) or ``"cavity"`` for the driven
    cavity instability.
    """

    def __init__(self, message, which):
        super().__init__(message)
        self.which = which


class QuadratureError(SolverError):
    pass


class StepUnderflowError(SolverError):
    pass


class ConvergenceError(SolverError):
    """Iteration budget exhausted; ``last`` carries the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class NoBracketError(SolverError):
    pass


class ResidualError(SolverError):
    pass


class MemoryBudgetError(SolverError):
    pass


class DispersiveWarning(UserWarning):
    """g/|delta_q| is large enough that the dispersive expansion is suspect."""


class GridWarning(UserWarning):
    """Wigner grid does not contain the state (boundary values non-negligible)."""


class MomentUndefinedWarning(UserWarning):
    """Relative moment error requested for a state with vanishing moment."""
