# ==============================================================================
# ⚠️ Error Types - shared by every eddy-casimir module
# ==============================================================================
from typing import Optional


class EddyCasimirError(Exception):
    """Base class for every error raised by the eddy-casimir library."""


class PoleEvaluationError(EddyCasimirError, ZeroDivisionError):
    """A dielectric function was evaluated exactly at one of its poles."""


class NotApplicableError(EddyCasimirError, ValueError):
    """The operation has no meaning for the given material (e.g. diffusion in the plasma model)."""


class BranchPointError(EddyCasimirError, ValueError):
    """A square-root branch was requested exactly at its branch point."""


class DomainError(EddyCasimirError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConfigError(EddyCasimirError, ValueError):
    """A run configuration could not be parsed or failed validation."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class ConvergenceError(EddyCasimirError, RuntimeError):
    """An iterative procedure stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class RegimeWarning(UserWarning):
    """An asymptotic formula was evaluated outside the regime it describes."""
