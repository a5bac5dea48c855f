"""
Classical geometry of the junction at a fixed energy

Turning points, the kinetic branches K+/- = mu +/- sqrt(E^2 - Delta^2), the
real action integrals over the lead and the imaginary barrier exponent that
controls tunneling widths. Integrals near the turning point use the
substitution x = x0 -/+ u^2 so the adaptive rule sees a smooth integrand.

License: MIT
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate, optimize

from junction_model import JunctionProfile, RampShape, eval_delta, eval_mu
from solver_errors import DegenerateSlopeError, NoTurningPointError, ProfileError, QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_TOL_ROOT = 1e-12
DEFAULT_TOL_QUAD = 1e-10
SIMPSON_INTERVALS = 10**6
QUAD_LIMIT = 200

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ActionIntegrals:
    """Electron and hole actions S+ and S- over [-x0, x0]"""
    plus: float
    minus: float
    abserr: float = 0.0

    @property
    def difference(self) -> float:
        return self.plus - self.minus


@dataclass(frozen=True)
class BarrierExponent:
    """Imaginary action through the gap region"""
    ramp_integral: float
    tail_rate: float
    x_end: float
    total: float


@dataclass(frozen=True)
class LocalSlope:
    alpha: float
    beta: float
    xi0: float
    x0: float


@dataclass(frozen=True)
class ClassicalGeometry:
    """Bicharacteristic data of the junction at one energy"""
    energy: float
    x0: float
    xi0: float
    alpha: float
    beta: float
    action_plus: float
    action_minus: float
    barrier_exponent: float
    tail_rate: float


def imag_sqrt(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """
    Imaginary part of the principal sqrt(a + i b) for a > 0, b >= 0.

    Written as b / sqrt(2(|a + ib| + a)) to avoid cancellation for small b.
    """
    return b / np.sqrt(2.0 * (np.hypot(a, b) + a))


def kinetic_branches(profile: JunctionProfile, energy: float,
                     x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Kinetic energies K+(x) and K-(x) at the given energy.

    Where Delta(x) > E the square root continues to i sqrt(Delta^2 - E^2).

    Args:
        profile: Junction profile
        energy: Energy E
        x: Position(s)

    Returns:
        Tuple (K_plus, K_minus), complex
    """
    delta = np.asarray(eval_delta(profile, x))
    mu = np.asarray(eval_mu(profile, x))
    gap = energy * energy - delta * delta
    root = np.where(gap >= 0, np.sqrt(np.abs(gap)) + 0j, 1j * np.sqrt(np.abs(gap)))
    k_plus, k_minus = mu + root, mu - root
    if np.ndim(x):
        return k_plus, k_minus
    return complex(k_plus), complex(k_minus)


def turning_point(profile: JunctionProfile, energy: float,
                  tol_root: float = DEFAULT_TOL_ROOT) -> float:
    """
    Point x0 on the positive ramp where Delta(x0) = E.

    Raises:
        NoTurningPointError: If E is not inside (0, delta0)
    """
    if not 0 < energy < profile.delta0:
        raise NoTurningPointError(
            f"energy {energy} has no turning point, need 0 < E < {profile.delta0}"
        )
    if profile.ramp_shape == RampShape.HARD_WALL:
        return profile.lead_half_length

    width = profile.x2 - profile.x1
    xtol = max(tol_root * width / (4.0 * profile.delta0), 1e-15)
    x0 = optimize.bisect(
        lambda x: eval_delta(profile, x) - energy,
        profile.x1, profile.x2, xtol=xtol, maxiter=400,
    )
    residual = abs(eval_delta(profile, x0) - energy)
    if residual > tol_root:
        logger.warning(f"Turning point residual {residual:.2e} above {tol_root:.1e} at E={energy}")
    return float(x0)


def composite_simpson(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                      intervals: int = SIMPSON_INTERVALS) -> float:
    """
    Composite Simpson rule on a uniform grid.

    Args:
        func: Vectorized integrand
        a: Lower limit
        b: Upper limit
        intervals: Number of subintervals (rounded up to even)

    Returns:
        Integral estimate
    """
    if b <= a:
        return 0.0
    n = intervals + intervals % 2
    x = np.linspace(a, b, n + 1)
    y = func(x)
    step = (b - a) / n
    return float(step / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def _integrate(func: Callable, a: float, b: float, tol_quad: float,
               method: str, intervals: int) -> Tuple[float, float]:
    if b <= a:
        return 0.0, 0.0
    if method == "simpson":
        return composite_simpson(func, a, b, intervals), 0.0
    if method != "adaptive":
        raise ValueError(f"Unknown quadrature method: {method}")

    result = integrate.quad(func, a, b, epsabs=1e-15, epsrel=tol_quad,
                            limit=QUAD_LIMIT, full_output=1)
    value, abserr = result[0], result[1]
    # quad appends a message only when it did not converge
    if len(result) > 3:
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] failed: {result[3]}", abserr)
    return float(value), float(abserr)


def action_integrals(profile: JunctionProfile, energy: float,
                     tol_quad: float = DEFAULT_TOL_QUAD,
                     tol_root: float = DEFAULT_TOL_ROOT,
                     method: str = "adaptive",
                     intervals: int = SIMPSON_INTERVALS) -> ActionIntegrals:
    """
    Actions S+/- = integral of sqrt(K+/-) over [-x0, x0].

    The lead part is constant and integrated in closed form; the ramp part
    [lead_end, x0] uses x = x0 - u^2.

    Args:
        profile: Junction profile
        energy: Energy in (0, delta0)
        tol_quad: Relative tolerance for the adaptive rule
        tol_root: Turning point tolerance
        method: "adaptive" (scipy quad) or "simpson" (brute-force oracle)
        intervals: Simpson subintervals

    Returns:
        ActionIntegrals
    """
    x0 = turning_point(profile, energy, tol_root)
    mu = profile.mu0
    lead_end = x0 if profile.ramp_shape == RampShape.HARD_WALL else profile.x1
    u_max = math.sqrt(max(x0 - lead_end, 0.0))

    values = []
    abserr = 0.0
    for sign in (1.0, -1.0):
        def integrand(u, sign=sign):
            delta = eval_delta(profile, x0 - u * u)
            root = np.sqrt(np.maximum(energy * energy - delta * delta, 0.0))
            return 2.0 * u * np.sqrt(mu + sign * root)

        ramp, err = _integrate(integrand, 0.0, u_max, tol_quad, method, intervals)
        values.append(2.0 * (lead_end * math.sqrt(mu + sign * energy) + ramp))
        abserr += 2.0 * err

    logger.debug(f"Actions at E={energy}: S+={values[0]:.12g}, S-={values[1]:.12g}")
    return ActionIntegrals(plus=values[0], minus=values[1], abserr=abserr)


def ramp_action(profile: JunctionProfile, energy: float,
                tol_quad: float = DEFAULT_TOL_QUAD,
                tol_root: float = DEFAULT_TOL_ROOT,
                method: str = "adaptive",
                intervals: int = SIMPSON_INTERVALS) -> float:
    """
    Envelope action q(E) = integral of sqrt(E^2 - Delta^2) over [x1, x0].

    Zero for a hard wall. Uses x = x0 - u^2 like action_integrals.
    """
    if profile.ramp_shape == RampShape.HARD_WALL:
        return 0.0
    x0 = turning_point(profile, energy, tol_root)

    def integrand(u):
        delta = eval_delta(profile, x0 - u * u)
        return 2.0 * u * np.sqrt(np.maximum(energy * energy - delta * delta, 0.0))

    value, _ = _integrate(integrand, 0.0, math.sqrt(max(x0 - profile.x1, 0.0)), tol_quad,
                          method, intervals)
    return value


def barrier_exponent(profile: JunctionProfile, energy: float,
                     x_end: Optional[float] = None,
                     tol_quad: float = DEFAULT_TOL_QUAD,
                     tol_root: float = DEFAULT_TOL_ROOT,
                     method: str = "adaptive",
                     intervals: int = SIMPSON_INTERVALS) -> BarrierExponent:
    """
    Barrier exponent Theta(E) = integral of Im sqrt(K+) over [x0, x_end].

    The ramp part [x0, tail_start] is integrated numerically with
    x = x0 + u^2; beyond it the integrand is the constant tail rate
    Im sqrt(mu0 + i sqrt(delta0^2 - E^2)) up to the bank edge.

    Args:
        profile: Junction profile
        energy: Energy in (0, delta0]; E = delta0 gives an empty barrier
        x_end: Outer integration limit (default: the barrier end of the profile)

    Returns:
        BarrierExponent with the ramp integral, tail rate and total
    """
    end = profile.barrier_end if x_end is None else float(x_end)
    if end < profile.tail_start:
        raise ProfileError(f"x_end={end} must not be below the plateau start {profile.tail_start}")
    if energy >= profile.delta0:
        return BarrierExponent(ramp_integral=0.0, tail_rate=0.0, x_end=end, total=0.0)

    x0 = turning_point(profile, energy, tol_root)
    mu = profile.mu0
    tail_rate = float(imag_sqrt(mu, math.sqrt(profile.delta0 ** 2 - energy ** 2)))

    def integrand(u):
        delta = eval_delta(profile, x0 + u * u)
        return 2.0 * u * imag_sqrt(mu, np.sqrt(np.maximum(delta * delta - energy * energy, 0.0)))

    u_max = math.sqrt(max(profile.tail_start - x0, 0.0))
    ramp, _ = _integrate(integrand, 0.0, u_max, tol_quad, method, intervals)

    outer = min(end, profile.bank_edge) if profile.is_leaky else end
    total = ramp + tail_rate * max(outer - profile.tail_start, 0.0)
    return BarrierExponent(ramp_integral=ramp, tail_rate=tail_rate, x_end=end, total=total)


def local_slope(profile: JunctionProfile, energy: float,
                tol_root: float = DEFAULT_TOL_ROOT) -> LocalSlope:
    """
    Gap slope alpha = Delta'(x0), xi0 = sqrt(mu(x0)) and beta = sqrt(alpha)(2 xi0)^(-3/2).

    Raises:
        DegenerateSlopeError: If the slope at the turning point is not positive
    """
    x0 = turning_point(profile, energy, tol_root)
    xi0 = math.sqrt(eval_mu(profile, x0))
    if profile.ramp_shape == RampShape.HARD_WALL:
        return LocalSlope(alpha=math.inf, beta=math.inf, xi0=xi0, x0=x0)

    step = tol_root ** (1.0 / 3.0) * (profile.x2 - profile.x1)
    step = min(step, x0 - profile.x1, profile.x2 - x0)
    if step > 0:
        alpha = (eval_delta(profile, x0 + step) - eval_delta(profile, x0 - step)) / (2.0 * step)
    else:
        alpha = 0.0
    if not alpha > 0:
        raise DegenerateSlopeError(f"gap slope {alpha} at x0={x0} is not positive")
    beta = math.sqrt(alpha) * (2.0 * xi0) ** -1.5
    return LocalSlope(alpha=float(alpha), beta=float(beta), xi0=xi0, x0=x0)


def compute_geometry(profile: JunctionProfile, energy: float,
                     tol_quad: float = DEFAULT_TOL_QUAD,
                     tol_root: float = DEFAULT_TOL_ROOT) -> ClassicalGeometry:
    """Collect turning point, slope, actions and barrier exponent at one energy"""
    slope = local_slope(profile, energy, tol_root)
    actions = action_integrals(profile, energy, tol_quad, tol_root)
    barrier = barrier_exponent(profile, energy, tol_quad=tol_quad, tol_root=tol_root)
    return ClassicalGeometry(
        energy=energy, x0=slope.x0, xi0=slope.xi0, alpha=slope.alpha, beta=slope.beta,
        action_plus=actions.plus, action_minus=actions.minus,
        barrier_exponent=barrier.total, tail_rate=barrier.tail_rate,
    )
