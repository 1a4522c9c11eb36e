"""
Error Taxonomy
Every failure raised by the toolkit derives from SagarchError
The CLI maps each family to an exit code (see frontend/cli.py)
"""

from typing import Any, Dict, List, Optional


class SagarchError(Exception):
    """Base class for all toolkit errors"""

    kind = "error"


class ParameterError(SagarchError, ValueError):
    """Invalid parameter value, bound or count"""

    kind = "parameter"


class DomainError(SagarchError, ValueError):
    """Argument outside the mathematical domain of an operation"""

    kind = "domain"


class DataError(SagarchError, ValueError):
    """
    Malformed input data
    Carries the offending line numbers when known
    """

    kind = "data"

    def __init__(self, message: str, lines: Optional[List[int]] = None):
        self.lines = list(lines or [])
        if self.lines:
            shown = ", ".join(str(i) for i in self.lines[:10])
            more = "" if len(self.lines) <= 10 else f" (+{len(self.lines) - 10} more)"
            message = f"{message} at line(s) {shown}{more}"
        super().__init__(message)


class UsageError(SagarchError):
    """Bad command-line usage or run configuration"""

    kind = "usage"


class NumericError(SagarchError, ArithmeticError):
    """Generic numerical failure"""

    kind = "numeric"


class QuadratureError(NumericError):
    """
    Quadrature did not reach the requested tolerance
    Carries the requested tolerance, the achieved estimate and, when the
    failure happened inside a likelihood sum, the offending time index
    """

    kind = "quadrature"

    def __init__(
        self,
        message: str,
        tolerance: float,
        estimate: float,
        abserr: float = float("nan"),
        t: Optional[int] = None,
    ):
        self.tolerance = tolerance
        self.estimate = estimate
        self.abserr = abserr
        self.t = t
        detail = f"{message} (tolerance={tolerance:g}, estimate={estimate:.12g}, abserr={abserr:.3g})"
        if t is not None:
            detail += f" at t={t}"
        super().__init__(detail)

    def at(self, t: int) -> "QuadratureError":
        """Copy of this error tagged with the time index that triggered it"""
        base = str(self).split(" (tolerance=")[0]
        return QuadratureError(base, self.tolerance, self.estimate, self.abserr, t=t)


class OptimizationError(NumericError):
    """All optimizer starts failed"""

    kind = "optimization"

    def __init__(self, message: str, diagnostics: Optional[List[Dict[str, Any]]] = None):
        self.diagnostics = list(diagnostics or [])
        super().__init__(f"{message} ({len(self.diagnostics)} start(s) tried)")


class RankDeficiencyError(NumericError):
    """Singular information matrix; names the block responsible"""

    kind = "rank"

    def __init__(self, message: str, block: str):
        self.block = block
        super().__init__(f"{message} [block {block}]")


class DegenerateError(NumericError):
    """Zero scale or variance where a positive one is required"""

    kind = "degenerate"


class ExperimentError(SagarchError):
    """Too many failed Monte Carlo replications"""

    kind = "experiment"

    def __init__(self, message: str, failures: int = 0, replications: int = 0):
        self.failures = failures
        self.replications = replications
        super().__init__(message)
