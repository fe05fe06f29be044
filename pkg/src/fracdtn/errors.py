"""Exception types raised by the library."""


class FracDtnError(Exception):
    """Base class for all library errors."""


class DomainError(FracDtnError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionError(FracDtnError, ValueError):
    """Vector and operator dimensions do not match."""


class SingularSystemError(FracDtnError, ArithmeticError):
    """A shifted linear system could not be solved to the residual target."""


class ConvergenceError(FracDtnError, RuntimeError):
    """An iterative or adaptive procedure hit its cap before converging."""


class CrossCheckError(FracDtnError, RuntimeError):
    """Two routes that must agree disagree beyond their error budget."""


class FitError(FracDtnError, RuntimeError):
    """An extrapolation fit is dominated by quadrature noise."""


class NonNegativityError(FracDtnError, RuntimeError):
    """The resolvent failed at a sampled positive lambda."""
