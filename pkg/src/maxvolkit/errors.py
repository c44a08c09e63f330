"""Exception hierarchy shared by every module."""


class MaxvolError(Exception):
    """Base class for all errors raised by maxvolkit."""


class DimensionError(MaxvolError, ValueError):
    """Matrix shapes are incompatible with the requested operation."""


class RankDeficient(MaxvolError, ArithmeticError):
    """Input is (numerically) rank deficient where full column rank is required."""


class IterationLimit(MaxvolError, ArithmeticError):
    """Iteration cap hit before convergence.

    The partial result is attached as ``result`` so callers can still use it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class CombinatorialLimit(MaxvolError, ValueError):
    """Exhaustive search would exceed the enumeration guard."""


class InvalidBounds(MaxvolError, ValueError):
    """Row-count bounds are inconsistent with the matrix shape."""


class ParseError(MaxvolError, ValueError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyDataset(MaxvolError, ValueError):
    """A ratings file contained no ratings."""
