"""Exception hierarchy.

Every error raised on purpose by the library derives from ``LambdaAppellError``
so callers (the CLI in particular) can tell domain failures from bugs.
"""


class LambdaAppellError(Exception):
    """Base class for domain errors."""


class BoundsError(LambdaAppellError, IndexError):
    """An index fell outside a precomputed table or a finite sequence."""


class TruncationError(LambdaAppellError):
    """A computation needs more moments (or polynomials) than are available."""


class NotLoweringError(LambdaAppellError):
    """The symbol polynomial of the operator has a positive integer root."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ZeroOperatorError(LambdaAppellError):
    """All coefficients of the operator vanish."""


class NotFactorableError(LambdaAppellError):
    """The symbol polynomial does not split into linear factors over Q."""


class PreconditionError(LambdaAppellError):
    """Input violates a documented precondition (zero gamma, bad parameter...)."""
