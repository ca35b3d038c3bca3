"""
Exception hierarchy for the feedback-arc-set laboratory
The CLI maps these to exit codes and the HTTP layer maps them to status codes
"""
from typing import Optional, Tuple


class FasLabError(Exception):
    """Base class for every error raised by the laboratory"""


class GraphFormatError(FasLabError):
    """An edge list or pair sequence violates the oriented-digraph rules"""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None, line: Optional[int] = None):
        self.pair = pair
        self.line = line
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if pair is not None:
            parts.append(f"pair {pair}")
        prefix = f"{', '.join(parts)}: " if parts else ""
        super().__init__(f"{prefix}{message}")


class BudgetExceededError(FasLabError):
    """An exponential-time operation was asked to run beyond its configured budget"""

    def __init__(self, what: str, requested: int, limit: int):
        self.what = what
        self.requested = requested
        self.limit = limit
        super().__init__(
            f"{what}: requested size {requested} exceeds budget {limit} "
            f"(raise it with FASLAB_BUDGET_OVERRIDE)"
        )


class PreconditionError(FasLabError):
    """A caller-supplied input does not satisfy an operation's precondition"""

    def __init__(self, message: str, **details):
        self.details = details
        if details:
            rendered = ", ".join(f"{k}={v}" for k, v in details.items())
            message = f"{message} ({rendered})"
        super().__init__(message)


class InvariantError(FasLabError):
    """Two quantities that must agree did not"""

    def __init__(self, message: str, expected=None, actual=None):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{message}: expected {expected}, got {actual}")


class ConvergenceError(FasLabError):
    """Power iteration hit its iteration cap"""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"power iteration did not converge after {iterations} iterations (residual {residual:.3e})")


class OrientationExhaustedError(FasLabError):
    """No random orientation passed the dyadic-pair check within the allowed tries"""

    def __init__(self, tries: int, worst_excess: float):
        self.tries = tries
        self.worst_excess = worst_excess
        super().__init__(
            f"no orientation passed the dyadic check in {tries} tries "
            f"(worst excess over the allowed deviation: {worst_excess:.3f})"
        )


class HarnessError(FasLabError):
    """Experiment specification or run failure"""
