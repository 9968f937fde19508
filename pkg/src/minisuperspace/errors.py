"""Exception taxonomy shared by all modules.

The CLI maps these onto report entries by class name, so names are stable.
"""


class MinisuperspaceError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(MinisuperspaceError, ValueError):
    pass


class ConstraintInfeasibleError(MinisuperspaceError, ValueError):
    def __init__(self, message, discriminant=None):
        super().__init__(message)
        self.discriminant = discriminant


class DriftExceededError(MinisuperspaceError, RuntimeError):
    def __init__(self, message, step=None, drift=None):
        super().__init__(message)
        self.step = step
        self.drift = drift


class DomainError(MinisuperspaceError, ValueError):
    pass


class UnsupportedRangeError(MinisuperspaceError, ValueError):
    pass


class EvaluationError(MinisuperspaceError, ArithmeticError):
    pass


class SingularTransformError(MinisuperspaceError, ValueError):
    pass


class FactorizationUnsupportedError(MinisuperspaceError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GridTooCoarseError(MinisuperspaceError, ValueError):
    pass


class NonPositiveSpectrumError(MinisuperspaceError, ArithmeticError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class QuadratureError(MinisuperspaceError, ArithmeticError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class UndecidedError(MinisuperspaceError, ArithmeticError):
    def __init__(self, message, fits=None):
        super().__init__(message)
        self.fits = fits


class NotASolutionError(MinisuperspaceError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoRealSolutionError(MinisuperspaceError, ValueError):
    pass


class ScenarioParseError(MinisuperspaceError):
    pass


class ScenarioValidationError(MinisuperspaceError):
    pass
