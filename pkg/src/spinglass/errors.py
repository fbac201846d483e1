"""Shared error taxonomy.

The CLI maps these to exit codes: bad input -> 1, solver failures -> 2,
capacity limits -> 3.
"""
from __future__ import annotations


class BadInputError(ValueError):
    """Invalid argument or malformed input file."""


class MixtureError(BadInputError):
    """Invalid mixture coefficients or an out-of-domain transform."""


class SingularMatrixError(BadInputError):
    """A matrix that the operation requires to be invertible is singular.

    Raised e.g. for the 2x2 complexity covariance of a pure mixture, or for
    the Franz-Parisi conditioning matrix of a pure mixture when the reduced
    variant was not requested.
    """


class SingularBlockError(SingularMatrixError):
    """Observed block in Gaussian conditioning is singular and pseudo-inverse
    mode was not enabled."""


class RegimeMismatchError(BadInputError):
    """A temperature-regime precondition does not hold (e.g. a
    high-temperature formula queried above the critical point)."""


class KMismatchError(BadInputError):
    """The replica-symmetry-breaking level found by the solver does not match
    what the formula requires."""


class SolverFailedError(RuntimeError):
    """Optimizer finished without a passing optimality certificate."""


class NotBracketedError(SolverFailedError):
    """Root search could not bracket the target (e.g. no symmetry breaking
    detected below the configured maximum inverse temperature)."""


class CapacityExceededError(RuntimeError):
    """Requested dense-tensor size exceeds the configured memory caps."""
