"""
Exception hierarchy for trace-convexity.

Every error raised on purpose by the library derives from TraceConvexityError,
and additionally from the closest builtin so callers can keep catching
ValueError / RuntimeError / ArithmeticError.
"""


class TraceConvexityError(Exception):
    """Base class for all library errors"""


class DomainError(TraceConvexityError, ValueError):
    """An operand or exponent lies outside the domain of an operation"""


class ConvergenceError(TraceConvexityError, RuntimeError):
    """An iterative routine did not converge"""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (off-diagonal residual {residual:.3e})")
        self.residual = residual


class ConsistencyError(TraceConvexityError, ArithmeticError):
    """A quantity that must hold exactly in theory drifted beyond tolerance"""


class ProbeError(TraceConvexityError):
    """A functional evaluation failed inside a probe trial"""

    def __init__(self, message: str, trial: int):
        super().__init__(f"{message} (trial {trial})")
        self.trial = trial
