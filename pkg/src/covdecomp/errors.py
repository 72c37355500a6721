"""Exception and warning types raised across the package."""


class CovDecompError(Exception):
    """Base class for all package errors."""


class InvalidInput(CovDecompError, ValueError):
    """Input fails a precondition (shape, symmetry, sign of the diagonal, ...)."""


class DimMismatch(InvalidInput):
    pass


class NumericalError(CovDecompError, ArithmeticError):
    """Base class for failures of a numerical routine on valid-looking input."""


class NotPositiveDefinite(NumericalError):
    pass


class CompositeNotPD(NotPositiveDefinite):
    """The composed covariance ``inv(J_M) + Sigma_R`` is not positive definite."""


class NoConvergence(NumericalError):
    pass


class GenerationFailed(NumericalError):
    pass


class DualInfeasible(NumericalError):
    pass


class SingularGamma(NumericalError):
    pass


class SupportViolation(InvalidInput):
    """Residual support is not contained in the Markov support."""


class IndexOutOfRange(InvalidInput, IndexError):
    pass


class MaxIterationsExceeded(RuntimeWarning):
    """Solver hit its iteration cap; the best iterate is still returned."""
