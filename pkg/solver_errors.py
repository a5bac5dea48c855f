"""
Exception hierarchy for the Andreev spectrum solvers

Every error derives from AndreevError and from the builtin that best describes
it, so callers can catch either ValueError/RuntimeError or the specific type.

License: MIT
"""
from typing import Optional


class AndreevError(Exception):
    """Base class for all solver and harness errors"""


class ProfileError(AndreevError, ValueError):
    """Junction parameters violate the profile invariants"""


class NoTurningPointError(AndreevError, ValueError):
    """Energy has no turning point on the gap ramp"""


class DegenerateSlopeError(AndreevError, ValueError):
    """Gap slope at the turning point is not a usable finite positive number"""


class QuadratureError(AndreevError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class ScanResolutionError(AndreevError, RuntimeError):
    """Root scan could not bracket every root unambiguously"""


class SpecialFunctionDomainError(AndreevError, ValueError):
    """Arguments lie outside the supported domain of the series evaluator"""


class DiscretizationError(AndreevError, ValueError):
    """Grid, scaling angle or scaling start are invalid for the profile"""


class ConvergenceError(AndreevError, RuntimeError):
    """An iterative solver stopped before meeting its tolerance"""

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class NegativeWidthError(ConvergenceError):
    """Resonance width is negative beyond the numerical floor"""


class ConfigError(AndreevError, ValueError):
    """Run configuration failed validation"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
