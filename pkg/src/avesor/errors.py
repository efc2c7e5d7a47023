"""Exception types shared across the package."""


class AvesorError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(AvesorError, ValueError):
    """Operands have inconsistent or unusable shapes."""


class DomainError(AvesorError, ValueError):
    """A scalar argument lies outside the mathematical domain of the function."""


class NonDifferentiablePointError(DomainError):
    """The function is not differentiable at the requested point."""


class SingularMatrixError(AvesorError, ArithmeticError):
    """A factorization hit an exactly or numerically singular pivot."""


class NotPositiveDefiniteError(AvesorError, ArithmeticError):
    """A Cholesky-type factorization was requested but the matrix is not SPD."""


class NumericalBreakdownError(AvesorError, ArithmeticError):
    """An iteration produced a non-finite quantity or failed to terminate."""


class NoConvergentOmegaError(AvesorError, RuntimeError):
    """No relaxation parameter in the sweep grid produced a converged solve."""


class MatrixMarketFormatError(AvesorError, ValueError):
    """A MatrixMarket file could not be parsed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
