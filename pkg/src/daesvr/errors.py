"""Exception types shared across the package."""


class DaeSvrError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DaeSvrError):
    """An argument lies outside the mathematical domain of an operation."""


class DegreeTooLarge(DaeSvrError):
    """A polynomial degree exceeds the supported range."""


class NonConvergence(DaeSvrError):
    """An iteration failed to converge within its iteration budget.

    The best iterate seen so far, when one exists, is attached as
    ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class GridError(DaeSvrError):
    """A discretization grid is malformed (unsorted, non-uniform, too short)."""


class ParseError(DaeSvrError):
    """Problem text could not be parsed; message carries location context."""


class ValidationError(DaeSvrError):
    """A parsed problem violates a structural rule."""


class EvaluationError(DaeSvrError):
    """A field or residual evaluation produced a non-finite value."""


class ShapeError(DaeSvrError):
    """Assembled operator blocks have inconsistent dimensions."""


class NotPositiveDefinite(DaeSvrError):
    """A matrix expected to be symmetric positive definite is not."""


class SingularSchur(DaeSvrError):
    """The bias Schur complement is singular; biases are not identifiable."""


class MissingExact(DaeSvrError):
    """An error report was requested for a problem with no exact solution."""


class SelfCheckError(DaeSvrError):
    """A case's stated exact solution fails to satisfy its own equations.

    Raised by the benchmark layer before any solve; guards against
    transcription slips in the encoded systems.
    """
