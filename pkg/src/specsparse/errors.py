"""Exception types shared across the package."""


class SparsifyError(Exception):
    """Base class for all errors raised by specsparse."""


class NonPositiveWeight(SparsifyError, ValueError):
    pass


class VertexOutOfRange(SparsifyError, ValueError):
    pass


class DimensionMismatch(SparsifyError, ValueError):
    pass


class Disconnected(SparsifyError, ValueError):
    pass


class TreeDoesNotSpan(SparsifyError, ValueError):
    pass


class TreeNotSubgraph(SparsifyError, ValueError):
    pass


class SubgraphMismatch(SparsifyError, ValueError):
    pass


class NotUnweighted(SparsifyError, ValueError):
    pass


class ZeroDegree(SparsifyError, ValueError):
    pass


class NonPositiveProbability(SparsifyError, ValueError):
    pass


class DenseTooLarge(SparsifyError, ValueError):
    pass


class VertexSetMismatch(SparsifyError, ValueError):
    pass


class MaxIterationsExceeded(SparsifyError, RuntimeError):
    """Iterative method stopped before reaching its tolerance.

    ``residual`` carries the achieved relative error estimate.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ParseError(SparsifyError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IoError(SparsifyError, OSError):
    pass


class TooLargeForExhaustive(UserWarning):
    """Emitted when cut enumeration falls back to random cuts."""
