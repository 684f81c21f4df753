"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, numerical errors
(ConvergenceError, SingularDesignError, DegenerateInputError,
DimensionError) -> 2.
"""


class DirFdrError(Exception):
    """Base class for all package errors."""


class ConfigError(DirFdrError):
    """Invalid configuration or command-line input."""


class DegenerateInputError(DirFdrError, ValueError):
    """Input data is degenerate (zero column, non-PSD Gram, zero residual)."""


class DimensionError(DirFdrError, ValueError):
    """Shapes of inputs are inconsistent."""


class SingularDesignError(DirFdrError):
    """A least-squares subproblem is rank deficient."""


class ConvergenceError(DirFdrError):
    """An iterative solver did not converge within its iteration budget."""

    def __init__(self, message, last_change=None):
        super().__init__(message)
        self.last_change = last_change


class VerificationError(DirFdrError):
    """An oracle check failed."""
