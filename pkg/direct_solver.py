"""
Direct numerical solvers for the BdG operator

The operator is discretized on [-X, X] with Dirichlet ends and stored as a
banded matrix with electron and hole unknowns interleaved (e_j = 2j,
h_j = 2j + 1), which keeps the bandwidth at two on each side. Three solvers
run on top of it:

- bound_states: Sturm inertia counting with block LDL pivots, bisection,
  then inverse iteration.
- resonances_complex_scaling: shift-invert inverse iteration on the
  exterior-scaled matrix with banded complex LU.
- shooting_resonance: outgoing/decaying mode matching at x = 0 with an
  adaptive Runge-Kutta integrator and Newton iteration on the energy.

License: MIT
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, sparse

from junction_model import JunctionProfile, eval_delta, eval_mu, eval_phase
from semiclassical_spectrum import Level, Method, SpectrumResult
from solver_errors import (ConvergenceError, DiscretizationError, NegativeWidthError,
                           ProfileError)

logger = logging.getLogger(__name__)

MIN_POINTS = 500
MAX_THETA = 0.3
MIN_RESONANCE_THETA = 0.05
STABILITY_STEP = 0.05
WIDTH_FLOOR = 1e-12
SHIFT_PERTURBATION = 1e-12
DEGENERATE_SEED = 1e-9
BISECTION_TOL = 1e-13
RAYLEIGH_ACCEPT = 1e-9
RESIDUAL_TOL = 1e-10
RAYLEIGH_SWITCH = 1e-3
DUPLICATE_TOL = 1e-7
INVERSE_MAX_ITER = 8
BOUNDARY_TOL = 1e-6
BANDS = (2, 2)


class ResonanceMethod(str, Enum):
    COMPLEX_SCALING = "complex_scaling"
    SHOOTING = "shooting"


@dataclass(frozen=True)
class Resonance:
    """Complex energy E - i Gamma/2 found near a real seed"""
    energy_complex: complex
    gamma: float
    method: ResonanceMethod
    seed: float
    theta_used: Optional[float] = None
    stability: float = 0.0
    escaped: bool = False
    iterations: int = 0
    residual: float = 0.0


@dataclass
class DiscretizedOperator:
    """
    Banded matrix of the (possibly complex-scaled) BdG operator.

    Diagonals are stored by global offset: `diagonal` has 2N entries,
    `upper[k]` / `lower[k]` hold the k-th super/sub-diagonal for k = 1, 2.
    """
    profile: JunctionProfile
    h: float
    X: float
    N: int
    theta: float
    x_scale_start: float
    x: np.ndarray
    diagonal: np.ndarray
    upper: Tuple[np.ndarray, np.ndarray]
    lower: Tuple[np.ndarray, np.ndarray]
    _sparse: Optional[sparse.csr_matrix] = field(default=None, repr=False)

    @property
    def dx(self) -> float:
        return 2.0 * self.X / (self.N + 1)

    @property
    def size(self) -> int:
        return 2 * self.N

    def banded(self, shift: complex = 0.0) -> np.ndarray:
        """(5, 2N) storage for scipy.linalg.solve_banded of M - shift I"""
        ab = np.zeros((5, self.size), dtype=complex)
        ab[2] = self.diagonal - shift
        for k in (1, 2):
            ab[2 - k, k:] = self.upper[k - 1]
            ab[2 + k, :-k] = self.lower[k - 1]
        return ab

    def to_sparse(self) -> sparse.csr_matrix:
        if self._sparse is None:
            self._sparse = sparse.diags(
                [self.lower[1], self.lower[0], self.diagonal, self.upper[0], self.upper[1]],
                [-2, -1, 0, 1, 2], format="csr",
            )
        return self._sparse

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        return self.to_sparse() @ vector

    def hermiticity_defect(self) -> float:
        """max |M - M^H| over the stored bands"""
        return float(max(
            np.max(np.abs(self.diagonal.imag)),
            np.max(np.abs(self.upper[0] - np.conj(self.lower[0]))),
            np.max(np.abs(self.upper[1] - np.conj(self.lower[1]))),
        ))


def kinetic_stencil(nodes: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Three-point stencil of -h^2 d^2/dz^2 on (possibly complex) nodes.

    Args:
        nodes: Contour points including both Dirichlet end points
        h: Planck parameter

    Returns:
        (lower, center, upper) coefficients for the interior nodes
    """
    spacing = np.diff(nodes)
    dm, dp = spacing[:-1], spacing[1:]
    lower = -2.0 * h * h / (dm * (dm + dp))
    upper = -2.0 * h * h / (dp * (dm + dp))
    center = 2.0 * h * h / (dm * dp)
    return lower, center, upper


def _scaled_contour(x: np.ndarray, x_scale_start: float, theta: float) -> np.ndarray:
    x_abs = np.abs(x)
    outside = x_abs > x_scale_start
    contour = x.astype(complex)
    contour[outside] = np.sign(x[outside]) * (
        x_scale_start + (x_abs[outside] - x_scale_start) * np.exp(1j * theta)
    )
    return contour


def discretize(profile: JunctionProfile, h: float, X: float, N: int, theta: float = 0.0,
               x_scale_start: Optional[float] = None) -> DiscretizedOperator:
    """
    Finite-difference BdG matrix on [-X, X].

    Beyond x_scale_start the coordinate is rotated into the complex plane.
    With a superconducting exterior both blocks share the angle theta; with a
    normal reservoir the hole block uses -theta so outgoing holes decay too.

    Args:
        profile: Junction profile
        h: Planck parameter
        X: Half width of the box
        N: Interior grid points per component
        theta: Exterior scaling angle in [0, 0.3]
        x_scale_start: Start of the scaled region (default: a quarter of the
            way from the plateau start to X)

    Returns:
        DiscretizedOperator

    Raises:
        DiscretizationError: On invalid grid, angle or scaling start
    """
    if not h > 0:
        raise DiscretizationError(f"h must be positive, got {h}")
    if N < MIN_POINTS:
        raise DiscretizationError(f"N must be at least {MIN_POINTS}, got {N}")
    if not X > profile.plateau_start:
        raise DiscretizationError(f"X={X} must exceed the plateau start {profile.plateau_start}")
    if not 0.0 <= theta <= MAX_THETA:
        raise DiscretizationError(f"theta={theta} outside [0, {MAX_THETA}]")
    if x_scale_start is None:
        x_scale_start = profile.plateau_start + 0.25 * (X - profile.plateau_start)
    if not profile.plateau_start <= x_scale_start < X:
        raise DiscretizationError(
            f"scaling start {x_scale_start} must lie in [{profile.plateau_start}, {X})"
        )

    nodes = np.linspace(-X, X, N + 2)
    x = nodes[1:-1]
    hole_theta = -theta if profile.is_leaky else theta

    e_low, e_mid, e_up = kinetic_stencil(_scaled_contour(nodes, x_scale_start, theta), h)
    h_low, h_mid, h_up = kinetic_stencil(_scaled_contour(nodes, x_scale_start, hole_theta), h)

    mu = eval_mu(profile, x)
    delta = eval_delta(profile, x)
    phase = eval_phase(profile, x)
    pair_up = delta * np.exp(0.5j * phase)
    pair_down = delta * np.exp(-0.5j * phase)

    size = 2 * N
    diagonal = np.empty(size, dtype=complex)
    diagonal[0::2] = e_mid - mu
    diagonal[1::2] = -h_mid + mu

    upper1 = np.zeros(size - 1, dtype=complex)
    lower1 = np.zeros(size - 1, dtype=complex)
    upper1[0::2] = pair_up
    lower1[0::2] = pair_down

    upper2 = np.empty(size - 2, dtype=complex)
    lower2 = np.empty(size - 2, dtype=complex)
    upper2[0::2] = e_up[:-1]
    upper2[1::2] = -h_up[:-1]
    lower2[0::2] = e_low[1:]
    lower2[1::2] = -h_low[1:]

    logger.debug(f"Discretized h={h} on [-{X}, {X}] with N={N}, theta={theta}, x_s={x_scale_start:.4g}")
    return DiscretizedOperator(
        profile=profile, h=h, X=X, N=N, theta=theta, x_scale_start=x_scale_start, x=x,
        diagonal=diagonal, upper=(upper1, upper2), lower=(lower1, lower2),
    )


# ============================================================================
# Bound states
# ============================================================================

def _sturm_counts(op: DiscretizedOperator, shifts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues below each shift from block LDL pivots; also a breakdown mask"""
    e_diag = op.diagonal[0::2].real
    h_diag = op.diagonal[1::2].real
    pairing = op.upper[0][0::2]
    e_hop = op.upper[1][0::2].real
    h_hop = op.upper[1][1::2].real

    counts = np.zeros(shifts.shape, dtype=int)
    breakdown = np.zeros(shifts.shape, dtype=bool)
    a = e_diag[0] - shifts
    d = h_diag[0] - shifts
    b = np.full(shifts.shape, pairing[0], dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(op.N):
            if j:
                a, d, b = (
                    e_diag[j] - shifts - e_hop[j - 1] ** 2 * d / det,
                    h_diag[j] - shifts - h_hop[j - 1] ** 2 * a / det,
                    pairing[j] + e_hop[j - 1] * h_hop[j - 1] * b / det,
                )
            det = a * d - (b.real ** 2 + b.imag ** 2)
            breakdown |= det == 0
            counts += (det < 0) + 2 * ((det > 0) & (a + d < 0))
    return counts, breakdown


def eigenvalue_count(op: DiscretizedOperator, shifts) -> np.ndarray:
    """
    Number of eigenvalues below each shift.

    A shift that hits an eigenvalue exactly is moved by 1e-12 delta0.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float)).copy()
    counts, breakdown = _sturm_counts(op, shifts)
    attempts = 0
    while breakdown.any():
        if attempts == 3:
            raise ConvergenceError("factorization broke down after shift perturbation")
        logger.warning(f"Pivot breakdown at {int(breakdown.sum())} shift(s); perturbing")
        shifts[breakdown] += SHIFT_PERTURBATION * op.profile.delta0
        retry, still = _sturm_counts(op, shifts[breakdown])
        counts[breakdown] = retry
        breakdown[breakdown] = still
        attempts += 1
    return counts


def _start_vector(size: int) -> np.ndarray:
    index = np.arange(size)
    return (1.0 + np.sin(math.sqrt(2.0) * index)).astype(complex)


def _inverse_iteration(op: DiscretizedOperator, energy: float,
                       max_iter: int = INVERSE_MAX_ITER) -> Tuple[float, np.ndarray, float]:
    """Inverse iteration at a fixed shift until the residual reaches RESIDUAL_TOL"""
    ab = op.banded(energy)
    vector = _start_vector(op.size)
    vector /= np.linalg.norm(vector)
    refined, residual = energy, math.inf
    for _ in range(max_iter):
        try:
            solved = linalg.solve_banded(BANDS, ab, vector, check_finite=False)
        except linalg.LinAlgError:
            ab = op.banded(energy + SHIFT_PERTURBATION * op.profile.delta0)
            solved = linalg.solve_banded(BANDS, ab, vector, check_finite=False)
        vector = solved / np.linalg.norm(solved)
        image = op.matvec(vector)
        rayleigh = float(np.vdot(vector, image).real)
        refined = rayleigh if abs(rayleigh - energy) <= RAYLEIGH_ACCEPT else energy
        residual = float(np.linalg.norm(image - refined * vector))
        if residual <= RESIDUAL_TOL:
            break
    return refined, vector, residual


def boundary_amplitude(vector: np.ndarray) -> float:
    """Largest amplitude on the two outermost sites relative to the maximum"""
    magnitude = np.abs(vector)
    edge = max(magnitude[:2].max(), magnitude[-2:].max())
    return float(edge / magnitude.max())


def bound_states(op: DiscretizedOperator, window: Tuple[float, float],
                 return_vectors: bool = False) -> SpectrumResult:
    """
    All eigenvalues of an unscaled operator inside the window.

    Args:
        op: Operator with theta = 0
        window: Energy window inside [-delta0, delta0]
        return_vectors: Keep the eigenvectors as columns of result.vectors

    Returns:
        SpectrumResult with method direct; level k counts from zero energy
        (negative for E < 0)

    Raises:
        DiscretizationError: If the operator is complex scaled
    """
    if op.theta != 0.0:
        raise DiscretizationError("bound states need an unscaled operator (theta = 0)")
    low, high = float(window[0]), float(window[1])
    delta0 = op.profile.delta0
    if not (-delta0 <= low < high <= delta0):
        raise ProfileError(f"window {window} must be a non-empty part of [-{delta0}, {delta0}]")

    count_low, count_high, count_zero = eigenvalue_count(op, [low, high, 0.0])
    indices = np.arange(count_low, count_high)
    lo = np.full(indices.shape, low)
    hi = np.full(indices.shape, high)
    tol = BISECTION_TOL * delta0
    rounds = int(math.ceil(math.log2(max((high - low) / tol, 2.0))))
    for _ in range(rounds if indices.size else 0):
        middle = 0.5 * (lo + hi)
        above = eigenvalue_count(op, middle) > indices
        hi = np.where(above, middle, hi)
        lo = np.where(above, lo, middle)
    logger.debug(f"Bisection: {indices.size} eigenvalues in {window} after {rounds} rounds")

    levels = []
    vectors = []
    for index, estimate in zip(indices, 0.5 * (lo + hi)):
        energy, vector, residual = _inverse_iteration(op, float(estimate))
        amplitude = boundary_amplitude(vector)
        if residual > RESIDUAL_TOL:
            logger.warning(f"Eigenpair near E={energy:.6g} has residual {residual:.2e}")
        if amplitude > BOUNDARY_TOL:
            logger.warning(f"State at E={energy:.6g} reaches the box edge (ratio {amplitude:.2e})")
        levels.append(Level(k=int(index - count_zero), energy=energy, branch=0,
                            residual=residual, boundary_amplitude=amplitude))
        vectors.append(vector)

    stacked = np.column_stack(vectors) if (return_vectors and vectors) else None
    logger.info(f"Direct solve h={op.h}, phi={op.profile.phi}: {len(levels)} levels in {window}")
    return SpectrumResult(levels=levels, method=Method.DIRECT, h=op.h, phi=op.profile.phi,
                          vectors=stacked)


def richardson_levels(profile: JunctionProfile, h: float, X: float, N: int,
                      window: Tuple[float, float]) -> SpectrumResult:
    """
    Bound states extrapolated in the grid spacing.

    Solves on N and 2N + 1 points (half the spacing, coarse nodes reused)
    and combines levels with the same label as (4 E_fine - E_coarse) / 3.
    Fine levels without a coarse partner are kept unextrapolated.
    """
    coarse = bound_states(discretize(profile, h, X, N), window)
    fine = bound_states(discretize(profile, h, X, 2 * N + 1), window)
    partners = {level.k: level.energy for level in coarse.levels}
    levels = []
    for level in fine.levels:
        if level.k in partners:
            level = replace(level, energy=(4.0 * level.energy - partners[level.k]) / 3.0)
        levels.append(level)
    unmatched = len(fine.levels) - sum(level.k in partners for level in fine.levels)
    if unmatched:
        logger.warning(f"{unmatched} level(s) near the window edge left unextrapolated")
    return SpectrumResult(levels=levels, method=Method.DIRECT, h=h, phi=profile.phi)


# ============================================================================
# Complex scaling
# ============================================================================

def _shift_invert(op: DiscretizedOperator, seed: complex, max_iter: int,
                  tol: float) -> Tuple[complex, int, float]:
    """Inverse iteration held at the seed, Rayleigh-shifted once the residual is small"""
    vector = _start_vector(op.size)
    vector /= np.linalg.norm(vector)
    shift = complex(seed)
    estimate = shift
    residual = math.inf
    scale = op.profile.delta0
    following = False
    for iteration in range(1, max_iter + 1):
        if following:
            shift = estimate
        try:
            solved = linalg.solve_banded(BANDS, op.banded(shift), vector, check_finite=False)
        except linalg.LinAlgError:
            shift += SHIFT_PERTURBATION * scale
            solved = linalg.solve_banded(BANDS, op.banded(shift), vector, check_finite=False)
        overlap = np.vdot(vector, solved)
        estimate = shift + 1.0 / overlap
        vector = solved / np.linalg.norm(solved)
        residual = float(np.linalg.norm(op.matvec(vector) - estimate * vector))
        logger.debug(f"Shift-invert step {iteration}: E={estimate:.12g}, residual {residual:.2e}")
        if residual <= tol * scale:
            return estimate, iteration, residual
        following = following or residual <= RAYLEIGH_SWITCH * scale
    raise ConvergenceError(f"shift-invert iteration from seed {seed} did not converge", residual)


def _mark_duplicates(resonances: List[Resonance], delta0: float) -> List[Resonance]:
    """Mark all but the nearest-seeded resonance escaped when distinct seeds reach one eigenvalue"""
    marked = list(resonances)
    for i, first in enumerate(resonances):
        for j in range(i + 1, len(resonances)):
            second = resonances[j]
            if abs(first.seed - second.seed) <= DEGENERATE_SEED * delta0:
                continue
            if abs(first.energy_complex - second.energy_complex) > DUPLICATE_TOL * delta0:
                continue
            drift_first = abs(first.energy_complex - first.seed)
            far = j if abs(second.energy_complex - second.seed) > drift_first else i
            if not marked[far].escaped:
                logger.warning(f"Seeds {first.seed:.8g} and {second.seed:.8g} reached the same "
                               f"eigenvalue {first.energy_complex:.8g}; keeping the nearer seed")
                marked[far] = replace(marked[far], escaped=True)
    return marked


def resonances_complex_scaling(profile: JunctionProfile, h: float, seeds: Sequence[float],
                               theta: float, X: Optional[float] = None, N: int = 4000,
                               x_scale_start: Optional[float] = None,
                               max_iter: int = 50, tol: float = RESIDUAL_TOL) -> List[Resonance]:
    """
    Complex-scaled resonances, one per seed.

    Each eigenvalue is re-solved at a second angle (theta + 0.05, or
    theta - 0.05 at the top of the range) and the displacement is reported
    as stability.

    Args:
        profile: Junction profile
        h: Planck parameter
        seeds: Real starting energies, usually Andreev levels
        theta: Scaling angle in [0.05, 0.3]
        X: Box half width (default: twice the plateau start)
        N: Grid points per component
        x_scale_start: Scaling start (default as in discretize)

    Returns:
        List of Resonance in seed order

    Raises:
        DiscretizationError: If theta is out of range
        ConvergenceError: If an iteration does not converge
        NegativeWidthError: If a width is negative beyond the floor
    """
    if not MIN_RESONANCE_THETA <= theta <= MAX_THETA:
        raise DiscretizationError(f"theta={theta} outside [{MIN_RESONANCE_THETA}, {MAX_THETA}]")
    X = 2.0 * profile.plateau_start if X is None else X
    second = theta + STABILITY_STEP if theta + STABILITY_STEP <= MAX_THETA else theta - STABILITY_STEP
    op = discretize(profile, h, X, N, theta, x_scale_start)
    op_second = discretize(profile, h, X, N, second, op.x_scale_start)

    seeds = [float(s) for s in seeds]
    resonances = []
    for i, seed in enumerate(seeds):
        energy, iterations, residual = _shift_invert(op, seed, max_iter, tol)
        moved, _, _ = _shift_invert(op_second, energy, max_iter, tol)

        gamma = -2.0 * energy.imag
        if gamma < -WIDTH_FLOOR:
            raise NegativeWidthError(f"negative width {gamma:.3e} at E={energy.real:.8g}")
        others = [abs(seed - s) for j, s in enumerate(seeds)
                  if j != i and abs(seed - s) > DEGENERATE_SEED * profile.delta0]
        spacing = min(others) if others else profile.delta0
        escaped = abs(energy - seed) > spacing
        if escaped:
            logger.warning(f"Resonance from seed {seed:.8g} escaped to {energy:.8g}")
        resonances.append(Resonance(
            energy_complex=complex(energy), gamma=float(gamma),
            method=ResonanceMethod.COMPLEX_SCALING, seed=seed, theta_used=theta,
            stability=float(abs(moved - energy)), escaped=escaped,
            iterations=iterations, residual=residual,
        ))
    resonances = _mark_duplicates(resonances, profile.delta0)
    logger.info(f"Complex scaling h={h}, theta={theta}: {len(resonances)} resonances")
    return resonances


# ============================================================================
# Shooting
# ============================================================================

def _exterior_modes(profile: JunctionProfile, h: float, energy: complex,
                    side: int) -> List[np.ndarray]:
    """Two outgoing or decaying modes (u, v, u', v') at the matching edge of one side"""
    mu0 = profile.mu0
    if profile.is_leaky:
        k_e = np.sqrt(mu0 + energy + 0j) / h
        k_h = np.sqrt(mu0 - energy + 0j) / h
        return [
            np.array([1.0, 0.0, side * 1j * k_e, 0.0], dtype=complex),
            np.array([0.0, 1.0, 0.0, -side * 1j * k_h], dtype=complex),
        ]

    s = np.sqrt(profile.delta0 ** 2 - energy ** 2 + 0j)
    half_phase = 0.5 * side * profile.phi
    modes = []
    for momentum in (np.sqrt(mu0 + 1j * s), -np.sqrt(mu0 - 1j * s)):
        k = side * momentum / h
        kinetic = momentum * momentum - mu0
        rows = np.array([
            [kinetic - energy, profile.delta0 * np.exp(1j * half_phase)],
            [profile.delta0 * np.exp(-1j * half_phase), -kinetic - energy],
        ])
        pick = rows[0] if np.linalg.norm(rows[0]) >= np.linalg.norm(rows[1]) else rows[1]
        amplitude = np.array([-pick[1], pick[0]])
        modes.append(np.concatenate([amplitude, 1j * k * amplitude]))
    return modes


def _propagate(profile: JunctionProfile, h: float, energy: complex, state: np.ndarray,
               start: float, rtol: float) -> np.ndarray:
    """Integrate one mode from x = start to x = 0 across the profile breakpoints"""
    def rhs(x, y):
        delta = eval_delta(profile, x)
        half_phase = 0.5 * eval_phase(profile, x)
        u, v = y[0], y[1]
        mu = profile.mu0
        return np.array([
            y[2], y[3],
            (delta * np.exp(1j * half_phase) * v - (energy + mu) * u) / (h * h),
            ((energy - mu) * v - delta * np.exp(-1j * half_phase) * u) / (h * h),
        ])

    sign = math.copysign(1.0, start)
    stops = [sign * p for p in reversed(profile.breakpoints()) if p < abs(start)] + [0.0]
    x = start
    for stop in stops:
        solution = integrate.solve_ivp(rhs, (x, stop), state, method="RK45",
                                       rtol=rtol, atol=rtol * 1e-3)
        if not solution.success:
            raise ConvergenceError(f"integration to x={stop} failed: {solution.message}")
        state = solution.y[:, -1]
        x = stop
    return state


def matching_matrix(profile: JunctionProfile, h: float, energy: complex,
                    margin: float = 0.1, rtol: float = 1e-10) -> np.ndarray:
    """4x4 matrix of right and left mode families at x = 0, rows (u, v, h u', h v')"""
    edge = profile.plateau_start + margin
    columns = []
    for side in (1, -1):
        for mode in _exterior_modes(profile, h, energy, side):
            state = _propagate(profile, h, energy, mode, side * edge, rtol)
            columns.append(state * np.array([1.0, 1.0, h, h]))
    return np.column_stack(columns)


def normalized_determinant(matrix: np.ndarray, scale: Optional[float] = None) -> complex:
    """det divided by the product of column norms (or by a given scale)"""
    if scale is None:
        scale = float(np.prod(np.linalg.norm(matrix, axis=0)))
    return complex(np.linalg.det(matrix) / scale)


def shooting_resonance(profile: JunctionProfile, h: float, seed: complex,
                       margin: float = 0.1, max_iter: int = 50, tol: float = RESIDUAL_TOL,
                       rtol: float = 1e-10) -> Resonance:
    """
    Resonance from mode matching at x = 0.

    Newton iteration on the normalized matching determinant with a complex
    finite-difference Jacobian. Column norms are frozen within each step.

    Args:
        profile: Junction profile
        h: Planck parameter
        seed: Starting energy inside the gap
        margin: Distance of the matching edge beyond the plateau start
        tol: Target for the normalized determinant
        rtol: Integrator relative tolerance

    Returns:
        Resonance with method shooting; stability holds the final |det|

    Raises:
        ProfileError: If the seed is not inside the gap
        ConvergenceError: If Newton does not converge or leaves the gap
    """
    seed = complex(seed)
    delta0 = profile.delta0
    if not abs(seed.real) < delta0:
        raise ProfileError(f"shooting seed {seed} must lie inside the gap")
    if margin < 0:
        raise ProfileError(f"margin must be non-negative, got {margin}")

    step_size = 1e-7 * delta0
    # integrator noise bounds how far Newton can resolve the root
    energy_tol = max(1e-12, 100.0 * rtol) * delta0
    width_floor = max(WIDTH_FLOOR, 10.0 * rtol * delta0)
    energy = seed
    value = math.inf
    for iteration in range(1, max_iter + 1):
        matrix = matching_matrix(profile, h, energy, margin, rtol)
        scale = float(np.prod(np.linalg.norm(matrix, axis=0)))
        value = normalized_determinant(matrix, scale)
        if abs(value) <= tol:
            break
        shifted = normalized_determinant(matching_matrix(profile, h, energy + step_size, margin, rtol), scale)
        derivative = (shifted - value) / step_size
        if derivative == 0:
            raise ConvergenceError("matching determinant has zero slope", abs(value))
        update = value / derivative
        energy = energy - update
        logger.debug(f"Newton step {iteration}: E={energy:.12g}, |det|={abs(value):.2e}")
        if abs(energy - seed) > delta0:
            raise ConvergenceError(f"Newton iteration left the gap from seed {seed}", abs(value))
        if abs(update) < energy_tol:
            value = normalized_determinant(matching_matrix(profile, h, energy, margin, rtol))
            break
    else:
        raise ConvergenceError(f"Newton iteration from seed {seed} did not converge", abs(value))

    gamma = -2.0 * energy.imag
    if gamma < -width_floor:
        raise NegativeWidthError(f"negative width {gamma:.3e} at E={energy.real:.8g}")
    return Resonance(
        energy_complex=complex(energy), gamma=float(gamma), method=ResonanceMethod.SHOOTING,
        seed=float(seed.real), stability=float(abs(value)), iterations=iteration,
        residual=float(abs(value)),
    )
