"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class AccuracyError(ArithmeticError):
    """A requested accuracy cannot be met within the evaluation budget."""


class ConvergenceError(ArithmeticError):
    """An infinite sum or iteration could not be certified to tolerance."""


class TruncationError(ConvergenceError):
    """A kernel series cannot be truncated within the term budget."""


class QuadratureError(ArithmeticError):
    """A quadrature rule failed to build or to reach its tolerance."""


class InvalidParamsError(ValueError):
    """Multiplier-space parameters violate the standing assumptions."""
