"""Exception types shared across the package."""


class OtsemiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(OtsemiError, ValueError):
    """An argument violates a documented precondition."""


class NumericalFailureError(OtsemiError, ArithmeticError):
    """A numerical routine left the range where its results are trustworthy."""


class UnsupportedSizeError(OtsemiError, ValueError):
    """A problem instance is outside the size range an operation supports."""


class IngestionError(OtsemiError, ValueError):
    """A data file could not be parsed or validated; the message names the offending row or column."""


class InfeasibleSplitError(OtsemiError, ValueError):
    """The requested labeled/unlabeled/new partition cannot be realised for this dataset."""


class ReportError(OtsemiError):
    """A result document could not be produced or written."""
