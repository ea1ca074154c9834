"""Exception hierarchy and the CLI exit codes attached to it."""

from typing import Any, Dict, Optional


class FracPoissonError(Exception):
    """Base class for every error raised by the library."""

    exit_code: int = 3

    def __init__(self, message: str, **diagnostics: Any):
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = diagnostics


class InputError(FracPoissonError, ValueError):
    """Invalid user input (bad grids, malformed claim law text, ...)."""

    exit_code = 2


class DomainError(FracPoissonError, ValueError):
    """Argument outside the domain of an operation."""


class SeriesRangeError(DomainError):
    """Plain-scale series requested outside the guard or overflowing.

    Callers should switch to ``log_ml`` or ``asymptotic_ml``.
    """


class NumericalError(FracPoissonError, ArithmeticError):
    """Quadrature, root finding or truncation failed to converge."""


class ConditionC1Error(NumericalError):
    """No positive interior root of the global cumulant exists."""


class NetProfitConditionError(ConditionC1Error):
    """Classical model (nu = 1) with c <= lambda * E[U] / h."""


class SimulationError(FracPoissonError, RuntimeError):
    """Monte Carlo dynamics misbehaved (step cap hit, negative drift)."""


class InsufficientReplicationsError(FracPoissonError):
    """Every cell of a Monte Carlo profile recorded zero hits."""

    exit_code = 4


def exit_code_for(exc: BaseException, default: Optional[int] = None) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(exc, FracPoissonError):
        return exc.exit_code
    if default is not None:
        return default
    return 3
