"""
Failure diagnostics for sweep tasks

Turns a solver exception plus its task context into short troubleshooting
hints. Enabled from the CLI with --diagnose.

License: MIT
"""
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional
import logging

logger = logging.getLogger(__name__)

Hint = Callable[[Exception, Dict[str, Any]], str]


class SolverDiagnostics(ABC):
    """Abstract base class for failure analysis"""

    @abstractmethod
    def analyze_error(self, error: Exception, context: Dict[str, Any]) -> Optional[str]:
        """
        Analyze a failure and suggest remedies.

        Args:
            error: The exception that was raised
            context: Where it happened, e.g. {"command": "spectrum", "method": "direct", "h": 0.03}

        Returns:
            Suggestion text, or None if no analysis is available
        """
        pass  # pragma: no cover

    @abstractmethod
    def is_enabled(self) -> bool:
        pass  # pragma: no cover


class NoOpDiagnostics(SolverDiagnostics):
    """Default analyzer that does nothing"""

    def analyze_error(self, error: Exception, context: Dict[str, Any]) -> Optional[str]:
        return None

    def is_enabled(self) -> bool:
        return False


def _where(context: Dict[str, Any]) -> str:
    parts = [f"{key}={context[key]}" for key in ("command", "method", "h", "phi") if key in context]
    return ", ".join(parts) if parts else "unknown task"


class RuleBasedDiagnostics(SolverDiagnostics):
    """Rule table from exception type name to a hint builder"""

    def __init__(self):
        self.error_patterns: Dict[str, Hint] = {
            "NegativeWidthError": self._negative_width_help,
            "ConvergenceError": self._convergence_help,
            "QuadratureError": self._quadrature_help,
            "ScanResolutionError": self._scan_help,
            "NoTurningPointError": self._turning_point_help,
            "DegenerateSlopeError": self._slope_help,
            "DiscretizationError": self._discretization_help,
            "ConfigError": self._config_help,
            "SpecialFunctionDomainError": self._domain_help,
            "LinAlgError": self._linalg_help,
        }

    def is_enabled(self) -> bool:
        return True

    def analyze_error(self, error: Exception, context: Dict[str, Any]) -> Optional[str]:
        handler = self.error_patterns.get(type(error).__name__)
        if handler is None:
            # Subclasses inherit the hint of their nearest known base
            for base in type(error).__mro__[1:]:
                if base.__name__ in self.error_patterns:
                    handler = self.error_patterns[base.__name__]
                    break
        if handler is None:
            handler = self._generic_help
        return handler(error, context)

    def _negative_width_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Negative Resonance Width ({_where(context)})
1. Increase the scaling angle; the continuum may not be rotated far enough
2. Move the scaling start further from the bank edge
3. Refine the grid (larger N) so the scaled tail is resolved
"""

    def _convergence_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: No Convergence ({_where(context)})
1. Check that the seed lies near an actual level (run the spectrum command first)
2. Increase the iteration limit or loosen the residual target
3. For shooting, move the seed closer or lower the integrator tolerance
"""

    def _quadrature_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Quadrature Failure ({_where(context)})
1. Loosen tolerances.quad in the config
2. Energies very close to 0 or delta0 make the action integrals stiff
"""

    def _scan_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Scan Resolution ({_where(context)})
1. Increase scan_points; levels are denser than the scan at small h
2. Check that the window is not empty
"""

    def _turning_point_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: No Turning Point ({_where(context)})
1. Energies must lie strictly inside (0, delta0)
2. Check the units block: windows in delta0 units must stay below 1
"""

    def _slope_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Degenerate Gap Slope ({_where(context)})
1. Width estimates need a smooth ramp; hard_wall profiles have no finite slope
2. Energies at the ramp ends give a vanishing quintic slope
"""

    def _discretization_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Invalid Discretization ({_where(context)})
1. grid.X must exceed the plateau start (bank_edge with a finite bank)
2. grid.N must be at least 500
3. Scaling angles must lie in [0.05, 0.3]
"""

    def _config_help(self, error: Exception, context: Dict[str, Any]) -> str:
        field = getattr(error, "field", "unknown")
        return f"""
💡 Troubleshooting: Configuration Field '{field}'
1. Fix the field named above and re-run
2. Compare with the samples under configs/
"""

    def _domain_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Special Function Domain ({_where(context)})
1. Orders and arguments must satisfy |nu| <= 30 and |z| <= 30
2. Narrow table_d.z_min / table_d.z_max
"""

    def _linalg_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: Singular Banded System ({_where(context)})
1. The shift hit an eigenvalue exactly; move the seed slightly
2. Check the profile for non-finite values
"""

    def _generic_help(self, error: Exception, context: Dict[str, Any]) -> str:
        return f"""
💡 Troubleshooting: {type(error).__name__} ({_where(context)})
1. Re-run with --log-level DEBUG to see solver progress
2. Reduce the sweep to the failing (h, phi) point to reproduce
"""
