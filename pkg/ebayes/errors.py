from typing import Optional


class EBayesError(Exception):
    """
    Base class for every error raised by the library.
    """


class DomainError(EBayesError, ValueError):
    """
    An argument lies outside the domain of the operation (non-finite data, λ outside [0, 1], ...).
    """


class StructureError(EBayesError, ValueError):
    """
    A structure is unusable: rank-deficient operator, orphan structure or malformed registry.
    """


class CapabilityError(EBayesError):
    """
    An enumeration or size budget was exceeded.
    """


class NumericError(EBayesError, ArithmeticError):
    """
    An iterative solver did not converge.
    """


class UsageError(EBayesError, ValueError):
    """
    Invalid experiment configuration or command line.
    """


class PrecisionError(EBayesError):
    """
    An estimator failed its accuracy diagnostic.

    Attributes:
        estimate: The estimate that was computed anyway.
        se: Its standard error (or the disagreement between refinements).
    """

    def __init__(self, message: str, estimate: float, se: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.se = se
