"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its tolerance.

    ``residual`` carries the best error estimate or constraint residual seen
    before giving up.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverError(NumericalError):
    """Multiplier search did not converge or hit a degenerate budget."""


class InfeasibleError(NumericalError):
    """No policy satisfies the requested budgets and scheduling constraint."""
