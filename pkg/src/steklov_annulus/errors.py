"""Exception hierarchy shared by all modules.

DomainError: the request lies outside the mathematical domain (bad shape
parameters, nonexistent crossing, wrong parameter regime).
NumericalError: the computation itself failed (lost bracket, non-convergence,
factorization breakdown). These should be unreachable for valid inputs.
"""


class SteklovError(Exception):
    pass


class DomainError(SteklovError):
    pass


class NumericalError(SteklovError):
    pass


class NoCrossing(DomainError):
    """The two requested branches never meet at finite T."""


class NotSPD(NumericalError):
    """Cholesky pivot breakdown: the matrix is not positive definite."""
