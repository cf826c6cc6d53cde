class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(RuntimeError):
    """An iterative method stopped without meeting its tolerance.

    ``last`` holds the final iterate and ``residual`` its residual.
    """

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class HypothesisError(ValueError):
    """The assumptions of a certified bound do not hold."""


class OverlapError(RuntimeError):
    """Two particles came closer than the overlap guard."""


class IntegratorError(RuntimeError):
    """The time integrator produced non-finite values."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
