"""
Parabolic cylinder functions and the Weber index at a branching point

D_nu(z) is summed from its even/odd confluent series about z = 0 with
Gamma-function coefficients:

    D_nu(z) = D_nu(0) e^{-z^2/4} M(-nu/2, 1/2, z^2/2)
            + D_nu'(0) z e^{-z^2/4} M((1-nu)/2, 3/2, z^2/2)

The two series cancel to many digits for large |z|, so they are summed in
mpmath with a working precision that grows with |z|^2.

License: MIT
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Union

import mpmath
import numpy as np

from solver_errors import SpecialFunctionDomainError

logger = logging.getLogger(__name__)

MAX_ARGUMENT = 30.0
MAX_ORDER = 30.0
GUARD_DIGITS = 25
MAX_SERIES_TERMS = 50000


@dataclass(frozen=True)
class WeberIndex:
    """Leading-order normal-form data at a branching point"""
    nu: float
    e1: float
    normal_form_argument: float


def weber_index(energy: float, xi0: float, alpha: float, h: float) -> WeberIndex:
    """
    Weber index nu = E^2 / (4 xi0 alpha h).

    Uses the leading normal-form term F0(t) = t/2 with t = E^2/(2 xi0 alpha).

    Args:
        energy: Energy E
        xi0: Momentum at the branching point
        alpha: Gap slope at the turning point
        h: Planck parameter

    Returns:
        WeberIndex with nu, rescaled energy e1 = E/(2 xi0)^2 and t
    """
    if not (alpha > 0 and xi0 > 0 and h > 0):
        raise ValueError(f"weber_index needs alpha, xi0, h > 0, got {alpha}, {xi0}, {h}")
    t = energy * energy / (2.0 * xi0 * alpha)
    return WeberIndex(nu=t / (2.0 * h), e1=energy / (2.0 * xi0) ** 2, normal_form_argument=t)


def _check_domain(nu: float, z: complex):
    if not (math.isfinite(nu) and abs(nu) <= MAX_ORDER):
        raise SpecialFunctionDomainError(f"order nu={nu} outside |nu| <= {MAX_ORDER}")
    if not (np.isfinite(z) and abs(z) <= MAX_ARGUMENT):
        raise SpecialFunctionDomainError(f"argument z={z} outside |z| <= {MAX_ARGUMENT}")


def _working_digits(nu: float, z: complex) -> int:
    # Kummer terms peak near e^{|z|^2/2} while D_nu can be as small as e^{-|z|^2/4}
    spread = abs(z) ** 2 * 0.75 + abs(nu) * math.log(2.0 + abs(z)) + abs(nu)
    return GUARD_DIGITS + int(math.ceil(spread / math.log(10.0)))


def _kummer_series(ctx, a, b, w):
    """Sum M(a, b, w) term by term at the precision of ctx"""
    term = ctx.mpc(1)
    total = ctx.mpc(1)
    largest = ctx.mpf(1)
    threshold = ctx.mpf(10) ** (-ctx.dps)
    n = 0
    while True:
        term *= (a + n) / ((b + n) * (n + 1)) * w
        total += term
        n += 1
        size = abs(term)
        if size > largest:
            largest = size
        if n > abs(w) and size <= threshold * largest:
            return total
        if n > MAX_SERIES_TERMS:
            raise SpecialFunctionDomainError(f"series for M({a}, {b}, w) did not settle")


def _series_D(nu: float, z: complex) -> complex:
    # Private context: workdps on mpmath.mp would leak precision across threads
    ctx = mpmath.MPContext()
    ctx.dps = _working_digits(nu, z)
    n = ctx.mpf(nu)
    zm = ctx.mpc(z)
    w = zm * zm / 2
    scale = ctx.power(2, n / 2) * ctx.exp(-zm * zm / 4)
    even = ctx.sqrt(ctx.pi) * ctx.rgamma((1 - n) / 2)
    odd = -ctx.sqrt(2 * ctx.pi) * ctx.rgamma(-n / 2)
    value = even * _kummer_series(ctx, -n / 2, ctx.mpf(1) / 2, w)
    value += odd * zm * _kummer_series(ctx, (1 - n) / 2, ctx.mpf(3) / 2, w)
    return complex(scale * value)


def parabolic_cylinder_D(nu: float, z: Union[complex, float]) -> complex:
    """
    Parabolic cylinder function D_nu(z).

    Solves w'' + (nu + 1/2 - z^2/4) w = 0 with D_nu(z) ~ z^nu e^{-z^2/4}
    for large positive z.

    Args:
        nu: Real order, |nu| <= 30
        z: Complex argument, |z| <= 30

    Returns:
        Complex value of D_nu(z)

    Raises:
        SpecialFunctionDomainError: Outside the supported domain
    """
    nu = float(nu)
    z = complex(z)
    _check_domain(nu, z)
    return _series_D(nu, z)


def parabolic_cylinder_D_prime(nu: float, z: Union[complex, float]) -> complex:
    """Derivative D_nu'(z) = (z/2) D_nu(z) - D_{nu+1}(z)"""
    nu = float(nu)
    z = complex(z)
    _check_domain(nu, z)
    return 0.5 * z * _series_D(nu, z) - _series_D(nu + 1.0, z)


def recurrence_D(nu: float, z: Union[complex, float], steps: int) -> List[complex]:
    """
    Propagate D upward with D_{m+1} = z D_m - m D_{m-1}.

    Starts from series values of D_{nu-1} and D_nu.

    Returns:
        [D_nu, D_{nu+1}, ..., D_{nu+steps}]
    """
    nu = float(nu)
    z = complex(z)
    _check_domain(nu, z)
    previous, current = _series_D(nu - 1.0, z), _series_D(nu, z)
    values = [current]
    order = nu
    for _ in range(steps):
        previous, current = current, z * current - order * previous
        order += 1.0
        values.append(current)
    return values


def hermite_closed_form(n: int, z: Union[complex, float]) -> complex:
    """Integer-order D_n(z) = He_n(z) e^{-z^2/4}, He from its three-term recurrence"""
    if n < 0:
        raise ValueError(f"Hermite closed form needs n >= 0, got {n}")
    z = complex(z)
    previous, current = 0j, 1.0 + 0j
    for m in range(n):
        previous, current = current, z * current - m * previous
    return current * np.exp(-z * z / 4.0)


def wronskian_reflected(nu: float, z: Union[complex, float]) -> complex:
    """
    W{D_nu(z), D_nu(-z)} = D_nu(z) d/dz[D_nu(-z)] - D_nu'(z) D_nu(-z).

    Equals sqrt(2 pi) / Gamma(-nu) for every z.
    """
    z = complex(z)
    return (parabolic_cylinder_D(nu, z) * -parabolic_cylinder_D_prime(nu, -z)
            - parabolic_cylinder_D_prime(nu, z) * parabolic_cylinder_D(nu, -z))


def branching_point_solution(nu: float, h: float, eta: Union[float, Sequence[float]],
                             epsilon: int = 1) -> np.ndarray:
    """
    Model solution D_{-nu-1}(i epsilon (h/2)^{-1/2} eta) near a branching point.

    Args:
        nu: Weber index
        h: Planck parameter
        eta: Rescaled coordinate(s)
        epsilon: +1 or -1, selecting the branch

    Returns:
        Complex array of the same shape as eta
    """
    if epsilon not in (1, -1):
        raise ValueError(f"epsilon must be +1 or -1, got {epsilon}")
    factor = 1j * epsilon * math.sqrt(2.0 / h)
    eta_values = np.asarray(eta, dtype=float)
    values = np.array([parabolic_cylinder_D(-nu - 1.0, factor * e) for e in eta_values.ravel()],
                      dtype=complex)
    return values.reshape(eta_values.shape)


def tabulate_D(nu_values: Sequence[float], z_values: Sequence[complex]) -> List[dict]:
    """Rows (nu, z_re, z_im, D_re, D_im) for every nu and z"""
    rows = []
    for nu in nu_values:
        for z in z_values:
            value = parabolic_cylinder_D(nu, z)
            z = complex(z)
            rows.append({
                "nu": float(nu), "z_re": z.real, "z_im": z.imag,
                "D_re": value.real, "D_im": value.imag,
            })
    logger.debug(f"Tabulated D for {len(nu_values)} orders x {len(z_values)} points")
    return rows
