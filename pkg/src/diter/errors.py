"""Exception types raised by the solvers."""

import numpy as np


class DiterError(Exception):
    """Base class for all package errors."""


class InvalidInputError(DiterError, ValueError):
    pass


class MalformedDomainError(DiterError, ValueError):
    """An interior site has a stencil neighbour that is neither interior nor boundary."""


class ProblemFileError(DiterError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ComplexRootsError(DiterError, ValueError):
    """4 a_plus a_minus > 1: the catalyst profile oscillates and has no real decay roots."""


class UnstableProfileError(DiterError, ValueError):
    """Normalisation denominator is not positive."""


class DomainError(DiterError, ValueError):
    pass


class NumericalFailureError(DiterError, ArithmeticError):
    pass


class SingularMatrixError(DiterError, np.linalg.LinAlgError):
    pass


class SingularDiscretizationError(DiterError, ZeroDivisionError):
    pass
