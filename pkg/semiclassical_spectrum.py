"""
Semiclassical Andreev spectrum

Levels solve the two-branch quantization condition

    g(E)/h - 2 chi(E, h) = +/-phi + 2 pi k

with g(E) = S+(E) - S-(E) for smooth profiles and the closed form
2L(sqrt(mu0+E) - sqrt(mu0-E)) in the hard-wall limit. The reflection phase
chi is arccos(E/delta0) for a step gap. On a smooth ramp it comes from the
Andreev envelope that decays into the bank: it tends to arccos(E/delta0)
when the ramp is short on the scale h v/delta0 and to pi/2 when it is
long. Roots are bracketed by a uniform scan and refined with a bracketing
solver.

License: MIT
"""
import functools
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import integrate, interpolate, optimize

from classical_geometry import action_integrals, barrier_exponent, local_slope, ramp_action
from junction_model import JunctionProfile, RampShape, SemiclassicalParams, eval_delta
from solver_errors import (ConvergenceError, DegenerateSlopeError, NoTurningPointError,
                           ProfileError, ScanResolutionError)

logger = logging.getLogger(__name__)

DEFAULT_SCAN_POINTS = 2000
DEFAULT_TOL_ROOT = 1e-10
DEFAULT_TOL_QUAD = 1e-10
DEFAULT_DPHI = 1e-3
DEGENERACY_TOL = 1e-9
# Scan endpoints stay this far (relative to delta0) inside the gap
EDGE_MARGIN = 1e-9
CONNECTION_RTOL = 1e-10


class Method(str, Enum):
    BOHR_SOMMERFELD = "bohr_sommerfeld"
    HARD_WALL = "hard_wall"
    DIRECT = "direct"


class Reflection(str, Enum):
    """Reflection phase used at the turning points"""
    CONNECTION = "connection"
    HARD_WALL = "hard_wall"


@dataclass(frozen=True)
class Level:
    """One level: integer label, energy, branch sign (+1/-1, 0 for direct) and residual"""
    k: int
    energy: float
    branch: int
    residual: float = 0.0
    boundary_amplitude: float = 0.0


@dataclass
class SpectrumResult:
    """Levels found by one method at one (h, phi)"""
    levels: List[Level]
    method: Method
    h: float
    phi: float
    vectors: Optional[np.ndarray] = None

    @property
    def energies(self) -> np.ndarray:
        return np.array([level.energy for level in self.levels], dtype=float)

    def branch(self, sign: int) -> List[Level]:
        return [level for level in self.levels if level.branch == sign]


@dataclass(frozen=True)
class SupercurrentEntry:
    k: int
    branch: int
    energy: float
    derivative: float
    flagged: bool = False


@dataclass(frozen=True)
class WidthEstimate:
    """Semiclassical width of a level leaking through the gap region"""
    energy: float
    theta: float
    alpha: float
    h: float
    h_prime: float
    prefactor: float
    bare_exponent: float
    wkb_exponent: float
    gamma_estimate: float


def hard_wall_phase_difference(mu0: float, L: float, energy):
    """g(E) = 2L(sqrt(mu0 + E) - sqrt(mu0 - E)); accepts arrays"""
    return 2.0 * L * (np.sqrt(mu0 + energy) - np.sqrt(mu0 - energy))


def hard_wall_reflection(energy, delta0: float):
    """Reflection phase arccos(E/delta0) of a step gap"""
    return np.arccos(np.clip(energy / delta0, -1.0, 1.0))


def quantization_phase(g, energy, h: float, delta0: float, chi=None):
    """Left-hand side g/h - 2 chi; chi defaults to the hard-wall phase"""
    if chi is None:
        chi = hard_wall_reflection(energy, delta0)
    return g / h - 2.0 * chi


def _check_in_gap(profile: JunctionProfile, energies: np.ndarray):
    if np.any(energies <= 0.0) or np.any(energies >= profile.delta0):
        raise NoTurningPointError(f"connection phase needs 0 < E < {profile.delta0}")


def envelope_phase(profile: JunctionProfile, energy, h: float):
    """
    Phase theta(x1) of g/f for the Andreev envelope that decays into the bank.

    With u = e^{i xi0 x/h} f and v = e^{i xi0 x/h} g the envelope obeys
    f' = i(E f - Delta g)/(h v), g' = i(Delta f - E g)/(h v), v = 2 xi0.
    |g/f| stays 1, so g/f = e^{i theta} with

        theta' = 2 (Delta(x) cos(theta) - E) / (h v)

    integrated from x2, where theta = -arccos(E/delta0), down to x1. The
    bank behind x2 is treated as an infinite plateau.

    Args:
        profile: Profile with a finite ramp
        energy: Energy or array of energies in (0, delta0)
        h: Planck parameter

    Returns:
        Unwrapped theta(x1), same shape as energy
    """
    if profile.ramp_shape == RampShape.HARD_WALL:
        raise DegenerateSlopeError("envelope phase needs a finite ramp")
    energies = np.atleast_1d(np.asarray(energy, dtype=float))
    _check_in_gap(profile, energies)
    hv = 2.0 * math.sqrt(profile.mu0) * h

    def rate(x, theta):
        return 2.0 * (eval_delta(profile, x) * np.cos(theta) - energies) / hv

    start = -hard_wall_reflection(energies, profile.delta0)
    solution = integrate.solve_ivp(rate, (profile.x2, profile.x1), start, method="DOP853",
                                   rtol=CONNECTION_RTOL, atol=CONNECTION_RTOL)
    if not solution.success:
        raise ConvergenceError(f"envelope integration failed: {solution.message}")
    theta = solution.y[:, -1]
    return theta if np.ndim(energy) else float(theta[0])


def connection_phase(profile: JunctionProfile, energy, h: float,
                     tol_quad: float = DEFAULT_TOL_QUAD):
    """
    Reflection phase chi(E, h) = 2 q(E)/(h v) - theta(x1), in (-pi/2, 3pi/2].

    q is the envelope action over [x1, x0]; subtracting it leaves the part
    of the envelope phase not already counted in g(E). Equals
    arccos(E/delta0) for a hard wall.
    """
    energies = np.atleast_1d(np.asarray(energy, dtype=float))
    if profile.ramp_shape == RampShape.HARD_WALL:
        chi = hard_wall_reflection(energies, profile.delta0)
    else:
        q = np.array([ramp_action(profile, e, tol_quad) for e in energies])
        chi = _connection_from_action(profile, energies, h, q)
    return chi if np.ndim(energy) else float(chi[0])


def _connection_from_action(profile: JunctionProfile, energies: np.ndarray, h: float,
                            q: np.ndarray) -> np.ndarray:
    hv = 2.0 * math.sqrt(profile.mu0) * h
    chi = 2.0 * q / hv - envelope_phase(profile, energies, h)
    return chi - 2.0 * math.pi * np.ceil((chi - 1.5 * math.pi) / (2.0 * math.pi))


def _scan_energies(window: Tuple[float, float], delta0: float, points: int) -> np.ndarray:
    low = max(window[0], EDGE_MARGIN * delta0)
    high = min(window[1], delta0 * (1.0 - EDGE_MARGIN))
    if not low < high:
        raise ScanResolutionError(f"energy window {window} is empty inside the gap")
    return np.linspace(low, high, points)


def _find_levels(phase: Callable[[float], float], base: np.ndarray, energies: np.ndarray,
                 phi: float, tol_root: float) -> List[Level]:
    """Bracket every crossing of base with +/-phi + 2 pi k and refine it on phase"""
    if np.any(np.diff(base) <= 0):
        raise ScanResolutionError("quantization phase is not increasing across the scan")

    levels = []
    for branch in (1, -1):
        counts = np.floor((base - branch * phi) / (2.0 * math.pi))
        jumps = np.diff(counts)
        if np.any(jumps > 1):
            raise ScanResolutionError(
                f"two roots within one scan step on branch {branch:+d}; increase scan points"
            )
        for i in np.nonzero(jumps)[0]:
            k = int(counts[i + 1])
            target = branch * phi + 2.0 * math.pi * k

            def condition(e, target=target):
                return phase(e) - target

            root = optimize.brentq(condition, energies[i], energies[i + 1],
                                   xtol=1e-15, maxiter=200)
            residual = abs(condition(root))
            if residual > tol_root:
                logger.warning(f"Level k={k} branch {branch:+d} residual {residual:.2e} above {tol_root:.1e}")
            levels.append(Level(k=k, energy=float(root), branch=branch, residual=float(residual)))

    levels.sort(key=lambda level: (level.energy, -level.branch))
    return levels


def hard_wall_levels(delta0: float, mu0: float, phi: float, L: float, h: float,
                     window: Tuple[float, float],
                     tol_root: float = DEFAULT_TOL_ROOT,
                     scan_points: int = DEFAULT_SCAN_POINTS) -> SpectrumResult:
    """
    Levels of the hard-wall junction.

    Args:
        delta0: Gap amplitude
        mu0: Chemical potential
        phi: Phase difference
        L: Lead half length
        h: Planck parameter
        window: Energy window inside (0, delta0)
        tol_root: Residual bound on the quantization condition
        scan_points: Uniform scan density

    Returns:
        SpectrumResult with method hard_wall
    """
    if not 0 < delta0 < mu0:
        raise ProfileError(f"need 0 < delta0 < mu0, got delta0={delta0}, mu0={mu0}")
    params = SemiclassicalParams(h=h, energy_window=tuple(window), tol_root=tol_root)
    if window[0] < 0 or window[1] > delta0:
        raise ProfileError(f"energy window {window} must lie in (0, {delta0})")

    energies = _scan_energies(params.energy_window, delta0, scan_points)

    def phase(e):
        return quantization_phase(hard_wall_phase_difference(mu0, L, e), e, h, delta0)

    levels = _find_levels(phase, phase(energies), energies, phi, tol_root)
    logger.debug(f"Hard-wall levels at h={h}, phi={phi}: {len(levels)}")
    return SpectrumResult(levels=levels, method=Method.HARD_WALL, h=h, phi=phi)


def action_difference(profile: JunctionProfile, energy: float,
                      tol_quad: float = DEFAULT_TOL_QUAD) -> float:
    """g(E) = S+(E) - S-(E)"""
    return action_integrals(profile, energy, tol_quad=tol_quad).difference


@functools.lru_cache(maxsize=32)
def _action_difference_table(profile: JunctionProfile, low: float, high: float,
                             points: int, tol_quad: float) -> np.ndarray:
    energies = np.linspace(low, high, points)
    table = np.array([action_difference(profile, e, tol_quad) for e in energies])
    table.flags.writeable = False
    logger.debug(f"Tabulated action difference on {points} energies in [{low:.4g}, {high:.4g}]")
    return table


@functools.lru_cache(maxsize=32)
def _ramp_action_table(profile: JunctionProfile, low: float, high: float,
                       points: int, tol_quad: float) -> np.ndarray:
    energies = np.linspace(low, high, points)
    return np.array([ramp_action(profile, e, tol_quad) for e in energies])


@functools.lru_cache(maxsize=32)
def _connection_table(profile: JunctionProfile, h: float, low: float, high: float,
                      points: int, tol_quad: float) -> np.ndarray:
    energies = np.linspace(low, high, points)
    if profile.ramp_shape == RampShape.HARD_WALL:
        table = hard_wall_reflection(energies, profile.delta0)
    else:
        q = _ramp_action_table(profile, low, high, points, tol_quad)
        table = _connection_from_action(profile, energies, h, q)
    table.flags.writeable = False
    logger.debug(f"Tabulated connection phase at h={h} on {points} energies")
    return table


def bohr_sommerfeld_levels(profile: JunctionProfile, h: float, window: Tuple[float, float],
                           phi: Optional[float] = None,
                           tol_root: float = DEFAULT_TOL_ROOT,
                           tol_quad: float = DEFAULT_TOL_QUAD,
                           scan_points: int = DEFAULT_SCAN_POINTS,
                           reflection: Reflection = Reflection.CONNECTION) -> SpectrumResult:
    """
    Bohr-Sommerfeld levels of a smooth profile.

    The action difference is tabulated once per (profile, window) and reused
    across h and phi; the connection phase once per (profile, h, window) and
    interpolated between scan energies during root refinement.

    Args:
        profile: Junction profile
        h: Planck parameter
        window: Energy window inside (0, delta0)
        phi: Phase difference (default: the profile's phase)
        tol_root: Residual bound on the quantization condition
        tol_quad: Quadrature tolerance for the actions
        scan_points: Uniform scan density
        reflection: connection (envelope phase at the ramp) or hard_wall
            (arccos(E/delta0) whatever the ramp)

    Returns:
        SpectrumResult with method bohr_sommerfeld
    """
    params = SemiclassicalParams(h=h, energy_window=tuple(window),
                                 tol_root=tol_root, tol_quad=tol_quad)
    params.check_window(profile)
    phase = profile.phi if phi is None else phi
    reflection = Reflection(reflection)

    energies = _scan_energies(params.energy_window, profile.delta0, scan_points)
    low, high = float(energies[0]), float(energies[-1])
    # g and chi do not depend on the phase
    neutral = replace(profile, phi=0.0)
    g_scan = _action_difference_table(neutral, low, high, scan_points, tol_quad)
    if reflection == Reflection.CONNECTION:
        chi_scan = _connection_table(neutral, h, low, high, scan_points, tol_quad)
        chi = interpolate.CubicSpline(energies, chi_scan)
    else:
        chi_scan = hard_wall_reflection(energies, profile.delta0)

        def chi(e):
            return hard_wall_reflection(e, profile.delta0)

    def condition(e):
        return quantization_phase(action_difference(profile, e, tol_quad), e, h, profile.delta0,
                                  chi=float(chi(e)))

    base = quantization_phase(g_scan, energies, h, profile.delta0, chi=chi_scan)
    levels = _find_levels(condition, base, energies, phase, tol_root)
    logger.debug(f"Bohr-Sommerfeld levels at h={h}, phi={phase}: {len(levels)}")
    return SpectrumResult(levels=levels, method=Method.BOHR_SOMMERFELD, h=h, phi=phase)


def track_derivatives(center: SpectrumResult, plus: SpectrumResult, minus: SpectrumResult,
                      dphi: float) -> List[SupercurrentEntry]:
    """
    Centered phase derivatives of the levels in `center`.

    Levels are matched by rank when the window holds the same number of levels
    at all three phases, otherwise by nearest neighbor. An entry is flagged
    when the counts differ or its shift exceeds half the distance to the next
    distinct level.
    """
    e0, e_plus, e_minus = center.energies, plus.energies, minus.energies
    same_count = len(e0) == len(e_plus) == len(e_minus)
    entries = []
    for rank, level in enumerate(center.levels):
        if same_count:
            up, down = e_plus[rank], e_minus[rank]
        elif len(e_plus) and len(e_minus):
            up = e_plus[np.argmin(np.abs(e_plus - level.energy))]
            down = e_minus[np.argmin(np.abs(e_minus - level.energy))]
        else:
            entries.append(SupercurrentEntry(level.k, level.branch, level.energy, math.nan, True))
            continue

        distances = np.abs(e0 - level.energy)
        distinct = distances[distances > DEGENERACY_TOL]
        gap = distinct.min() if distinct.size else math.inf
        shift = max(abs(up - level.energy), abs(down - level.energy))
        flagged = (not same_count) or shift > 0.5 * gap
        if flagged:
            logger.warning(f"Level tracking ambiguous near E={level.energy:.6g}")
        entries.append(SupercurrentEntry(
            k=level.k, branch=level.branch, energy=level.energy,
            derivative=float((up - down) / (2.0 * dphi)), flagged=flagged,
        ))
    return entries


def supercurrent(profile: JunctionProfile, h: float, phi: float, dphi: float = DEFAULT_DPHI,
                 window: Optional[Tuple[float, float]] = None,
                 tol_root: float = DEFAULT_TOL_ROOT,
                 tol_quad: float = DEFAULT_TOL_QUAD,
                 scan_points: int = DEFAULT_SCAN_POINTS,
                 reflection: Reflection = Reflection.CONNECTION) -> List[SupercurrentEntry]:
    """
    Phase derivatives dE_k/dphi of the Bohr-Sommerfeld levels.

    Args:
        profile: Junction profile
        h: Planck parameter
        phi: Phase at which to differentiate
        dphi: Half step of the centered difference
        window: Energy window (default: the whole gap)

    Returns:
        One SupercurrentEntry per level at phi
    """
    if not dphi > 0:
        raise ValueError(f"dphi must be positive, got {dphi}")
    window = window or (0.0, profile.delta0)

    def solve(phase: float) -> SpectrumResult:
        return bohr_sommerfeld_levels(profile, h, window, phi=phase, tol_root=tol_root,
                                      tol_quad=tol_quad, scan_points=scan_points,
                                      reflection=reflection)

    return track_derivatives(solve(phi), solve(phi + dphi), solve(phi - dphi), dphi)


def phase_slope(profile: JunctionProfile, energy: float, h: float,
                tol_quad: float = DEFAULT_TOL_QUAD,
                reflection: Reflection = Reflection.CONNECTION) -> float:
    """Energy derivative of the quantization phase, 2 pi over the local level spacing"""
    step = 1e-5 * profile.delta0
    step = min(step, 0.5 * energy, 0.5 * (profile.delta0 - energy))
    dg = (action_difference(profile, energy + step, tol_quad)
          - action_difference(profile, energy - step, tol_quad)) / (2.0 * step)
    if Reflection(reflection) == Reflection.HARD_WALL:
        return dg / h + 2.0 / math.sqrt(profile.delta0 ** 2 - energy ** 2)
    chi = connection_phase(profile, np.array([energy - step, energy + step]), h, tol_quad)
    return dg / h - (chi[1] - chi[0]) / step


def width_estimate(profile: JunctionProfile, energy: float, h: float,
                   x_end: Optional[float] = None,
                   tol_quad: float = DEFAULT_TOL_QUAD) -> WidthEstimate:
    """
    Semiclassical width prefactor * exp(-2 Theta / h'), h' = alpha h.

    The prefactor is the local level spacing over 2 pi. Both the scaled
    exponent -2 Theta/(alpha h) and the plain WKB exponent -2 Theta/h are
    returned.

    Raises:
        DegenerateSlopeError: For a hard-wall profile (no finite slope)
    """
    if profile.ramp_shape == RampShape.HARD_WALL:
        raise DegenerateSlopeError("width estimate needs a finite ramp slope")
    params = SemiclassicalParams(h=h, energy_window=(0.0, profile.delta0), tol_quad=tol_quad)
    slope = local_slope(profile, energy)
    theta = barrier_exponent(profile, energy, x_end, tol_quad=tol_quad).total
    h_prime = params.h_prime(slope.alpha)
    prefactor = 1.0 / phase_slope(profile, energy, h, tol_quad)
    bare = -2.0 * theta / h_prime
    return WidthEstimate(
        energy=energy, theta=theta, alpha=slope.alpha, h=h, h_prime=h_prime,
        prefactor=prefactor, bare_exponent=bare, wkb_exponent=-2.0 * theta / h,
        gamma_estimate=prefactor * math.exp(bare),
    )
