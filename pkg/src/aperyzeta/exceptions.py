class AperyZetaError(Exception):
    """Base class for errors raised by this package."""


class PrecisionError(AperyZetaError, ArithmeticError):
    """The requested precision cannot be delivered (or was not supplied)."""


class PoleError(AperyZetaError, ZeroDivisionError):
    """An expression was evaluated at (or numerically too close to) a pole."""


class DivergenceError(AperyZetaError, ValueError):
    """A series was requested outside its region of convergence."""


class NonTerminatingError(AperyZetaError, ValueError):
    pass


class NonConvergenceError(AperyZetaError, ArithmeticError):
    pass


class QuadratureError(NonConvergenceError):
    pass


class ConjectureViolation(AperyZetaError):
    """A conjectured identity failed at a concrete size.

    This is a result, not a bug: the identities checked here are unproven.
    ``index`` is the first failing size and ``detail`` holds the offending value.
    """

    def __init__(self, message, index=None, detail=None):
        super().__init__(message)
        self.index = index
        self.detail = detail
