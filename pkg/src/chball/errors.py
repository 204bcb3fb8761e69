"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ChballError`` so
the CLI can map it to exit code 1 (precondition failure).
"""


class ChballError(Exception):
    """Base class for all package errors."""


class DimensionError(ChballError, ValueError):
    pass


class DegenerateInputError(ChballError, ValueError):
    """A denominator or determinant vanished numerically."""


class NotInGroupError(ChballError, ValueError):
    """A matrix failed the U(m,1) (or K / M block) membership check."""


class NotLoxodromicError(ChballError, ValueError):
    pass


class BorderlineError(ChballError):
    """Classification cannot be decided at the configured tolerance."""


class ConvergenceError(ChballError):
    """An iteration did not converge.

    ``bracket`` holds the last (lower, upper) estimate when one is available.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class InconclusiveError(ChballError):
    """A search or rank decision came out ambiguous.

    ``best`` carries the best candidate found so far, if any.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PreconditionError(ChballError, ValueError):
    pass


class LimitSetNotResolved(ChballError):
    pass


class NoEscapeError(ChballError):
    """The orbit of the origin does not approach the boundary."""


class NoFractionalLinearModel(ChballError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateImage(ChballError, ValueError):
    pass
