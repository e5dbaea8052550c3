"""Exception types raised by the library.

All of them subclass ``ValueError`` so callers that only know about the
standard hierarchy still behave sensibly.
"""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class IllPosedPenaltyError(InvalidInputError):
    """Raised when the penalized Gram matrix is numerically singular.

    The reduced-rank solve needs ``X'X + diag(penalty)`` to be strictly
    positive definite; eigenvalues below ``1e-12`` times the largest one are
    rejected instead of pseudo-inverted.
    """


class DegenerateMarginError(InvalidInputError):
    """Raised by correspondence-analysis routines on a zero row or column.

    Empty margins are never dropped silently; the caller must drop or merge
    the offending rows/columns (the CLI exposes ``--drop-empty`` for this).
    """
