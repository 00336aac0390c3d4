"""Exception hierarchy.

Validation errors (bad inputs, bad parameters) derive from ``ValidationError``;
failures that happen while doing legitimate work derive from ``ComputationError``.
The CLI maps the first family to exit code 1 and the second to exit code 2.
"""


class NetLinSolveError(Exception):
    """Base class for all package errors."""


class ValidationError(NetLinSolveError, ValueError):
    pass


class ComputationError(NetLinSolveError, RuntimeError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class InvalidParams(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class SingularMatrix(ComputationError):
    pass


class GenerationFailed(ComputationError):
    pass


class Disconnected(ComputationError):
    pass


class TooLarge(ComputationError):
    pass


class DegenerateInitial(ComputationError):
    """Initial errors sum to zero, so the relative error is 0/0."""


class BoundViolated(ComputationError):
    """A proven inequality failed numerically; carries the counterexample."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
