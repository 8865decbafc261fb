class ValidationError(ValueError):
    """Input violates a documented precondition."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a trustworthy answer."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SolverError(NumericalError):
    """No enabled solver converged.

    ``value`` is the best value found and ``residual`` its stationarity or
    feasibility measure; ``sidedness`` says on which side of the true optimum
    the value is known to lie, if any.
    """

    def __init__(self, message, value=None, residual=None, iterations=None, sidedness=None):
        super().__init__(message, iterations=iterations)
        self.value = value
        self.residual = residual
        self.sidedness = sidedness
