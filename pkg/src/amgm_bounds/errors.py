"""Exception hierarchy shared by every module."""


class AmgmError(Exception):
    """Base class for all errors raised by amgm_bounds."""


class DimensionError(AmgmError, ValueError):
    """Vectors that must be aligned have different lengths."""


class DomainError(AmgmError, ValueError):
    """An input lies outside the domain of the operation (negative data, bad weights, ...)."""


class PreconditionError(AmgmError, ValueError):
    """An inequality was requested on input that violates its hypotheses."""


class DegenerateInputError(AmgmError, ValueError):
    """The requested quantity is 0/0 on this input (e.g. ratio of a constant vector)."""


class InvariantViolation(AmgmError, RuntimeError):
    """A computed certificate broke one of its own guarantees.

    This signals a bug or a floating-point failure, never bad user input.
    """
