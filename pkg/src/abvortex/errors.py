"""Exception hierarchy shared by every tier."""


class ScatteringError(Exception):
    """Base class for all errors raised by :mod:`abvortex`."""


class DomainError(ScatteringError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedRegimeError(DomainError):
    """The deficit parameter lies in a regime a closed form does not cover."""


class RegionError(DomainError):
    """An angle lies in a classical region the formula does not describe."""


class WrongBranchError(DomainError):
    """A Euclidean-only formula was called for conical space or vice versa."""


class ConfigurationError(ScatteringError, ValueError):
    """Run or summation parameters violate a structural requirement."""


class NumericError(ScatteringError, ArithmeticError):
    """An iterative evaluation failed to converge.

    Attributes
    ----------
    diagnostics : dict
        Whatever state the failing routine could report (iteration count,
        last increment, arguments).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
