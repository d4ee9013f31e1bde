"""Exception types raised across the package."""


class NovikovError(Exception):
    """Base class for all package errors."""


class ValidationError(NovikovError, ValueError):
    """Malformed input: bad dimensions, bad file contents, bad parameters."""


class InsufficientDataError(NovikovError):
    """No verifiable rational closed form fits the known coefficients."""


class TruncationError(NovikovError):
    """A coefficient below the known truncation order was requested."""


class DegenerateCritical(NovikovError):
    """A critical point has a Hessian eigenvalue below the eigen floor."""


class MaxStepsExceeded(NovikovError):
    """Flow integration did not reach a stopping condition."""


class NonTransversal(NovikovError):
    """A sphere point lands ambiguously close to a disc sole."""


class ConditionCNotVerified(NovikovError):
    """The fiber transport checks behind the return endomorphism failed."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BumpTouchesCriticalSet(NovikovError):
    """A perturbation bump is too large or too close to a critical point."""
