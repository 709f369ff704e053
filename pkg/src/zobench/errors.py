"""Exception hierarchy shared by every zobench module."""


class ZoBenchError(Exception):
    """Base class for all library errors."""


class DimensionError(ZoBenchError, ValueError):
    """Vector lengths disagree, or a dimension is not positive."""


class DomainError(ZoBenchError, ValueError):
    """An input lies outside the domain of the operation (e.g. non-finite)."""


class ArgumentError(ZoBenchError, ValueError):
    """A scalar argument violates its documented invariant."""


class EvaluationError(ZoBenchError, ArithmeticError):
    """An objective evaluation or update produced a non-finite number.

    The offending parameter vector is kept on ``theta`` for post-mortems.
    """

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class UndefinedReferenceError(ZoBenchError, ZeroDivisionError):
    """A relative error was requested against an all-zero reference."""


class UsageError(ZoBenchError, ValueError):
    """Bad experiment configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
