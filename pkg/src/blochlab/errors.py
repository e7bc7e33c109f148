"""Exception hierarchy for blochlab."""


class BlochLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BlochLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation at (or numerically at) a pole."""


class DivergentError(DomainError):
    """The requested value is infinite (e.g. J_nu(0) for nu < 0)."""


class ConvergenceError(BlochLabError, ArithmeticError):
    """A series or iteration did not converge within its budget."""


class RealityError(BlochLabError, ArithmeticError):
    """A quantity that must be real carried a large imaginary part."""


class InconsistencyError(BlochLabError, ArithmeticError):
    """Two mathematically equivalent routes disagree."""


class ScanError(BlochLabError):
    """Band scan produced an inconsistent set of edges."""


class EdgeDegeneracyError(BlochLabError, ArithmeticError):
    """Coefficient limit at a band edge could not be resolved."""


class QuadratureError(BlochLabError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


class StepFailure(BlochLabError, ArithmeticError):
    """ODE integrator could not take a step."""


class ConfigError(BlochLabError, ValueError):
    """Invalid run configuration."""
