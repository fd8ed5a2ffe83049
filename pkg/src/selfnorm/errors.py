"""Exception hierarchy shared by all modules.

The CLI maps these onto stable exit codes: ``ConfigError`` -> 1,
``PreconditionError`` (and subclasses) -> 2, ``NumericFailure`` -> 3.
"""


class ConfigError(ValueError):
    """Malformed or unknown configuration field."""


class PreconditionError(ValueError):
    """Inputs are valid numbers but outside the regime an operation covers."""


class DomainError(PreconditionError):
    """Tilt vector on or outside the boundary of the cumulant domain."""


class DegeneracyError(PreconditionError):
    """The jump vector is supported on a line; use ``selfnorm.exact_twopoint``."""


class RegimeError(PreconditionError):
    """The dominating point is not unique or fails the curvature condition."""


class NumericFailure(ArithmeticError):
    """A numerical routine did not reach its tolerance."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual={residual:.3g})")
        self.residual = residual
