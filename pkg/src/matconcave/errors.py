"""Exception types raised by the library."""


class DomainError(ValueError):
    """An input lies outside the domain where the quantity is defined."""


class ConvergenceError(RuntimeError):
    """An iterative routine (eigensolver, quadrature) failed to converge."""


class QuadratureError(ConvergenceError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NumericalConsistencyError(ArithmeticError):
    """A value that must be real came out with a non-negligible imaginary part."""
