"""Error types raised by the dmera package.

Every error carries a numeric code from ``ERROR_CODES`` so the command-line
front end can report it uniformly.
"""

from typing import Optional

ERROR_CODES = {
    "INVALID_ARGUMENT": 1001,
    "PHYSICALITY_VIOLATION": 1002,
    "DEGENERATE_OVERLAP": 1003,
    "DEGENERATE_SPECTRUM": 1004,
    "NOT_CONVERGED": 1005,
    "OPTIMIZATION_FAILED": 1006,
    "UNKNOWN_PARAMETERS": 1007,
    "ORACLE_SIZE_EXCEEDED": 1008,
    "REFERENCE_MISMATCH": 1009,
}


class DmeraError(Exception):
    """Base class for all domain errors"""

    code_name = "INVALID_ARGUMENT"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    @property
    def code(self) -> int:
        return ERROR_CODES[self.code_name]

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class InvalidArgumentError(DmeraError, ValueError):
    code_name = "INVALID_ARGUMENT"


class PhysicalityError(DmeraError):
    code_name = "PHYSICALITY_VIOLATION"


class DegenerateOverlapError(DmeraError):
    code_name = "DEGENERATE_OVERLAP"


class DegenerateSpectrumError(DmeraError):
    code_name = "DEGENERATE_SPECTRUM"


class ConvergenceError(DmeraError):
    """Iteration stopped before reaching the requested tolerance"""

    code_name = "NOT_CONVERGED"

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class OptimizationError(DmeraError):
    code_name = "OPTIMIZATION_FAILED"


class UnknownParametersError(DmeraError, KeyError):
    code_name = "UNKNOWN_PARAMETERS"

    def __str__(self) -> str:
        return DmeraError.__str__(self)


class OracleSizeError(DmeraError):
    code_name = "ORACLE_SIZE_EXCEEDED"


class ReferenceMismatchError(DmeraError):
    code_name = "REFERENCE_MISMATCH"
