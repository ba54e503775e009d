"""Exception hierarchy.

Every error carries enough context (offending index, gap, residual) to be
reported as a single machine-readable line by the CLI.
"""


class FHSpecError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class DomainError(FHSpecError, ValueError):
    """Invalid parameters or arguments outside a function's domain."""

    exit_code = 2


class SingularPointError(FHSpecError, ValueError):
    """Evaluation at a singular point of the symbol."""


class OnCurveError(FHSpecError, ValueError):
    """Winding number requested for a point lying on the curve."""


class ConvergenceError(FHSpecError, ArithmeticError):
    def __init__(self, message, residual=None, index=None):
        super().__init__(message)
        self.residual = residual
        self.index = index


class DegeneracyError(FHSpecError, ArithmeticError):
    """Numerically multiple or defective spectrum."""

    def __init__(self, message, gap=None, pair=None):
        super().__init__(message)
        self.gap = gap
        self.pair = pair


class IllPosedBasisError(FHSpecError, ArithmeticError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class GridTooCoarseError(FHSpecError, ArithmeticError):
    def __init__(self, message, sigma=None):
        super().__init__(message)
        self.sigma = sigma


class CapacityError(FHSpecError, MemoryError):
    exit_code = 2


class PoleError(FHSpecError, ZeroDivisionError):
    """Resolvent evaluated at an eigenvalue."""
