"""
Junction profiles for gated SNS junctions

A profile fixes the effective potentials of the 1-D BdG operator: the gap
Delta(x), the chemical potential mu(x) and the phase field phi(x) = sgn(x) phi.
Evaluators accept scalars or numpy arrays and return the same shape.

License: MIT
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from solver_errors import ProfileError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class RampShape(str, Enum):
    """Shape of the gap between the lead and the bank plateau"""
    QUINTIC = "quintic_smoothstep"
    LINEAR = "linear"
    HARD_WALL = "hard_wall"


@dataclass(frozen=True)
class JunctionProfile:
    """
    Gap, chemical potential and phase of a symmetric junction.

    The gap vanishes on |x| <= x1, ramps up on [x1, x2] and equals delta0 on
    the bank. With bank_edge set, the gap drops back to zero for
    |x| >= bank_edge (normal reservoir behind a finite bank).
    """
    delta0: float
    mu0: float
    phi: float
    x1: float
    x2: float
    lead_half_length: float
    ramp_shape: RampShape = RampShape.QUINTIC
    bank_edge: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "ramp_shape", RampShape(self.ramp_shape))
        _validate(self)

    @property
    def is_leaky(self) -> bool:
        """True when a normal reservoir sits behind a finite bank"""
        return self.bank_edge is not None

    @property
    def tail_start(self) -> float:
        """Point from which the gap is constant at delta0"""
        if self.ramp_shape == RampShape.HARD_WALL:
            return self.lead_half_length
        return self.x2

    @property
    def plateau_start(self) -> float:
        """Point beyond which all potentials are constant"""
        return self.bank_edge if self.is_leaky else self.x2

    @property
    def barrier_end(self) -> float:
        """Outer end of the region where the gap exceeds in-gap energies"""
        return self.bank_edge if self.is_leaky else self.tail_start

    @property
    def exterior_gap(self) -> float:
        """Gap value on the outer plateau"""
        return 0.0 if self.is_leaky else self.delta0

    def breakpoints(self) -> Tuple[float, ...]:
        """Positive points where the profile or its derivatives jump"""
        points = {self.x1, self.x2}
        if self.ramp_shape == RampShape.HARD_WALL:
            points.add(self.lead_half_length)
        if self.is_leaky:
            points.add(self.bank_edge)
        return tuple(sorted(points))


def _validate(profile: JunctionProfile):
    for name in ("delta0", "mu0", "phi", "x1", "x2", "lead_half_length"):
        if not math.isfinite(getattr(profile, name)):
            raise ProfileError(f"{name} must be finite")
    if profile.delta0 <= 0:
        raise ProfileError(f"delta0 must be positive, got {profile.delta0}")
    if profile.delta0 >= profile.mu0:
        raise ProfileError(
            f"gap exceeds chemical potential: delta0={profile.delta0} >= mu0={profile.mu0}"
        )
    if not 0 < profile.x1 < profile.lead_half_length < profile.x2:
        raise ProfileError(
            f"geometry must satisfy 0 < x1 < L < x2, got x1={profile.x1}, "
            f"L={profile.lead_half_length}, x2={profile.x2}"
        )
    if profile.bank_edge is not None and not profile.bank_edge > profile.x2:
        raise ProfileError(f"bank_edge must exceed x2, got {profile.bank_edge}")


def build_profile(delta0: float, mu0: float, phi: float, x1: float, x2: float, L: float,
                  ramp_shape: Union[str, RampShape] = RampShape.QUINTIC,
                  bank_edge: Optional[float] = None) -> JunctionProfile:
    """
    Build a validated junction profile.

    Args:
        delta0: Gap amplitude on the bank
        mu0: Chemical potential (constant)
        phi: Phase difference; the phase field is sgn(x) * phi
        x1: Edge of the gapless lead
        x2: Start of the gap plateau
        L: Lead half length, x1 < L < x2
        ramp_shape: quintic_smoothstep, linear or hard_wall
        bank_edge: Optional outer edge of a finite bank

    Returns:
        JunctionProfile

    Raises:
        ProfileError: If any invariant is violated
    """
    profile = JunctionProfile(
        delta0=float(delta0), mu0=float(mu0), phi=float(phi),
        x1=float(x1), x2=float(x2), lead_half_length=float(L),
        ramp_shape=RampShape(ramp_shape),
        bank_edge=None if bank_edge is None else float(bank_edge),
    )
    logger.debug(f"Built profile {profile}")
    return profile


def _as_output(values: np.ndarray, x: ArrayLike) -> ArrayLike:
    return values if np.ndim(x) else float(values)


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep 6t^5 - 15t^4 + 10t^3 (C2 at both ends)"""
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def eval_delta(profile: JunctionProfile, x: ArrayLike) -> ArrayLike:
    """Gap Delta(x); even, zero on the lead, delta0 on the bank"""
    x_abs = np.abs(np.asarray(x, dtype=float))
    if profile.ramp_shape == RampShape.HARD_WALL:
        shape = (x_abs >= profile.lead_half_length).astype(float)
    else:
        t = np.clip((x_abs - profile.x1) / (profile.x2 - profile.x1), 0.0, 1.0)
        shape = smoothstep(t) if profile.ramp_shape == RampShape.QUINTIC else t
    delta = profile.delta0 * shape
    if profile.is_leaky:
        delta = np.where(x_abs >= profile.bank_edge, 0.0, delta)
    return _as_output(delta, x)


def eval_mu(profile: JunctionProfile, x: ArrayLike) -> ArrayLike:
    """Chemical potential; constant mu0 everywhere"""
    return _as_output(np.full(np.shape(x), profile.mu0, dtype=float), x)


def eval_phase(profile: JunctionProfile, x: ArrayLike) -> ArrayLike:
    """Phase field sgn(x) * phi"""
    return _as_output(profile.phi * np.sign(np.asarray(x, dtype=float)), x)


@dataclass(frozen=True)
class SemiclassicalParams:
    """Planck parameter, search window and tolerances for level searches"""
    h: float
    energy_window: Tuple[float, float]
    tol_root: float = 1e-10
    tol_quad: float = 1e-10

    def __post_init__(self):
        if not self.h > 0:
            raise ProfileError(f"h must be positive, got {self.h}")
        low, high = self.energy_window
        if not low < high:
            raise ProfileError(f"energy window is empty: {self.energy_window}")
        if not (self.tol_root > 0 and self.tol_quad > 0):
            raise ProfileError("tolerances must be positive")

    def h_prime(self, alpha: float) -> float:
        """Rescaled Planck parameter alpha * h"""
        return alpha * self.h

    def check_window(self, profile: JunctionProfile):
        """Raise unless the window lies inside the gap (0, delta0)"""
        low, high = self.energy_window
        if low < 0 or high > profile.delta0:
            raise ProfileError(
                f"energy window {self.energy_window} must lie in (0, {profile.delta0})"
            )
