"""
Tests for Bohr-Sommerfeld and hard-wall levels, supercurrents and width estimates

License: MIT
"""
import cmath
import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest

from junction_model import RampShape, build_profile
from semiclassical_spectrum import (Level, Method, Reflection, SpectrumResult, action_difference,
                                    bohr_sommerfeld_levels, connection_phase, envelope_phase,
                                    hard_wall_levels, hard_wall_phase_difference, phase_slope,
                                    quantization_phase, supercurrent, track_derivatives,
                                    width_estimate)
from solver_errors import (DegenerateSlopeError, NoTurningPointError, ProfileError,
                           ScanResolutionError)
from special_functions import parabolic_cylinder_D, parabolic_cylinder_D_prime, weber_index

SCAN = 400


def _result(energies, method=Method.BOHR_SOMMERFELD, phi=0.0):
    levels = [Level(k=i, energy=e, branch=1) for i, e in enumerate(energies)]
    return SpectrumResult(levels=levels, method=method, h=0.1, phi=phi)


@pytest.mark.unit
class TestHardWallLevels:
    """Test the closed-form hard-wall quantization"""

    def test_phase_difference(self):
        assert hard_wall_phase_difference(4.0, 1.0, 0.5) == pytest.approx(
            2.0 * (math.sqrt(4.5) - math.sqrt(3.5)))
        values = hard_wall_phase_difference(4.0, 1.0, np.array([0.0, 0.2]))
        assert values.shape == (2,)
        assert values[0] == 0.0

    def test_residuals_within_tolerance(self):
        result = hard_wall_levels(1.0, 4.0, math.pi / 3, 1.0, 0.05, (0.0, 1.0))
        assert result.method == Method.HARD_WALL
        assert len(result.levels) > 4
        for level in result.levels:
            assert level.residual <= 1e-10
            assert 0.0 < level.energy < 1.0

    def test_roots_match_high_precision(self):
        h, phi = 0.05, 0.4
        result = hard_wall_levels(1.0, 4.0, phi, 1.0, h, (0.0, 1.0))
        mpmath.mp.dps = 30
        try:
            for level in result.levels:
                target = level.branch * phi + 2 * mpmath.pi * level.k

                def condition(e):
                    g = 2 * (mpmath.sqrt(4 + e) - mpmath.sqrt(4 - e))
                    return g / h - 2 * mpmath.acos(e) - target

                root = mpmath.findroot(condition, (level.energy - 1e-6, level.energy + 1e-6),
                                       solver="illinois")
                assert level.energy == pytest.approx(float(root), abs=1e-12)
        finally:
            mpmath.mp.dps = 15

    def test_count_matches_fine_scan(self):
        h, phi = 0.03, 0.7
        result = hard_wall_levels(1.0, 4.0, phi, 1.0, h, (0.0, 1.0))
        energies = np.linspace(1e-9, 1 - 1e-9, 20001)
        base = quantization_phase(hard_wall_phase_difference(4.0, 1.0, energies), energies, h, 1.0)
        expected = 0
        for sign in (1, -1):
            counts = np.floor((base - sign * phi) / (2 * math.pi))
            expected += int(counts[-1] - counts[0])
        assert len(result.levels) == expected

    def test_levels_sorted(self):
        energies = hard_wall_levels(1.0, 4.0, 1.0, 1.0, 0.04, (0.0, 1.0)).energies
        assert np.all(np.diff(energies) >= 0)

    def test_zero_phase_doubles_levels(self):
        result = hard_wall_levels(1.0, 4.0, 0.0, 1.0, 0.05, (0.0, 1.0))
        plus = [level.energy for level in result.branch(1)]
        minus = [level.energy for level in result.branch(-1)]
        assert plus == pytest.approx(minus, abs=1e-13)

    def test_phase_reversal_swaps_branches(self):
        forward = hard_wall_levels(1.0, 4.0, 0.8, 1.0, 0.05, (0.0, 1.0))
        backward = hard_wall_levels(1.0, 4.0, -0.8, 1.0, 0.05, (0.0, 1.0))
        assert [l.energy for l in forward.branch(1)] == pytest.approx(
            [l.energy for l in backward.branch(-1)], abs=1e-12)

    def test_window_restricts_levels(self):
        full = hard_wall_levels(1.0, 4.0, 0.5, 1.0, 0.05, (0.0, 1.0))
        part = hard_wall_levels(1.0, 4.0, 0.5, 1.0, 0.05, (0.3, 0.7))
        inside = [e for e in full.energies if 0.3 < e < 0.7]
        assert part.energies == pytest.approx(inside, abs=1e-12)

    def test_coarse_scan_is_rejected(self):
        with pytest.raises(ScanResolutionError):
            hard_wall_levels(1.0, 4.0, 0.5, 1.0, 0.005, (0.0, 1.0), scan_points=5)

    def test_window_outside_gap(self):
        with pytest.raises(ProfileError):
            hard_wall_levels(1.0, 4.0, 0.5, 1.0, 0.05, (0.0, 1.5))

    def test_gap_above_chemical_potential(self):
        with pytest.raises(ProfileError):
            hard_wall_levels(5.0, 4.0, 0.5, 1.0, 0.05, (0.0, 1.0))


@pytest.mark.unit
class TestConnectionPhase:
    """Test the envelope reflection phase at the ramp"""

    def test_hard_wall_is_arccos(self, hard_wall_profile):
        chi = connection_phase(hard_wall_profile, 0.4, 0.05)
        assert chi == pytest.approx(math.acos(0.4), abs=1e-15)
        values = connection_phase(hard_wall_profile, np.array([0.2, 0.6]), 0.05)
        assert values == pytest.approx(np.arccos([0.2, 0.6]), abs=1e-15)

    def test_envelope_matches_weber_solution(self, linear_profile):
        h, energy = 0.01, 0.3
        hv = 2.0 * math.sqrt(linear_profile.mu0) * h
        length = math.sqrt(hv)
        nu = weber_index(energy, xi0=2.0, alpha=1.0, h=h).nu - 1.0
        w_plus = parabolic_cylinder_D(nu, 0.0)
        w_minus = hv * math.sqrt(2.0) / length * parabolic_cylinder_D_prime(nu, 0.0) / (1j * energy)
        ratio = (w_minus - w_plus) / (1j * (w_plus + w_minus))
        theta = envelope_phase(linear_profile, energy, h)
        assert cmath.exp(1j * theta) == pytest.approx(ratio / abs(ratio), abs=1e-7)

    def test_array_matches_scalar(self, linear_profile):
        energies = np.array([0.3, 0.6])
        values = connection_phase(linear_profile, energies, 0.05)
        assert values.shape == (2,)
        assert values[1] == pytest.approx(connection_phase(linear_profile, 0.6, 0.05), abs=1e-9)
        assert np.all((values > -math.pi / 2) & (values <= 1.5 * math.pi))

    def test_short_ramp_approaches_arccos(self):
        short = build_profile(1.0, 4.0, math.pi / 3, 0.999, 1.001, 1.0, ramp_shape=RampShape.LINEAR)
        for energy in (0.3, 0.5, 0.8):
            assert abs(connection_phase(short, energy, 0.05) - math.acos(energy)) < 0.05

    @pytest.mark.slow
    def test_smooth_ramp_approaches_quarter_turn(self, linear_profile):
        for energy in (0.6, 0.7, 0.8):
            assert abs(connection_phase(linear_profile, energy, 0.001) - math.pi / 2) < 0.05

    def test_energy_outside_gap(self, linear_profile):
        with pytest.raises(NoTurningPointError):
            envelope_phase(linear_profile, 1.2, 0.05)
        with pytest.raises(NoTurningPointError):
            envelope_phase(linear_profile, 0.0, 0.05)

    def test_hard_wall_has_no_envelope(self, hard_wall_profile):
        with pytest.raises(DegenerateSlopeError):
            envelope_phase(hard_wall_profile, 0.5, 0.05)

    def test_quantization_default_is_hard_wall(self):
        assert quantization_phase(3.0, 0.5, 0.1, 1.0) == pytest.approx(30.0 - 2.0 * math.acos(0.5))
        assert quantization_phase(3.0, 0.5, 0.1, 1.0, chi=math.pi / 2) == pytest.approx(30.0 - math.pi)


@pytest.mark.unit
class TestBohrSommerfeld:
    """Test levels of smooth profiles"""

    def test_levels_satisfy_condition(self, reference_profile):
        h = 0.05
        result = bohr_sommerfeld_levels(reference_profile, h, (0.0, 1.0), scan_points=SCAN)
        assert result.method == Method.BOHR_SOMMERFELD
        assert result.phi == pytest.approx(math.pi / 3)
        assert result.levels
        for level in result.levels:
            chi = connection_phase(reference_profile, level.energy, h)
            lhs = quantization_phase(action_difference(reference_profile, level.energy),
                                     level.energy, h, 1.0, chi=chi)
            assert lhs == pytest.approx(level.branch * result.phi + 2 * math.pi * level.k, abs=1e-5)

    def test_hard_wall_reflection_option(self, reference_profile):
        h = 0.05
        result = bohr_sommerfeld_levels(reference_profile, h, (0.0, 1.0), scan_points=SCAN,
                                        reflection=Reflection.HARD_WALL)
        assert result.levels
        for level in result.levels:
            lhs = quantization_phase(action_difference(reference_profile, level.energy),
                                     level.energy, h, 1.0)
            assert lhs == pytest.approx(level.branch * result.phi + 2 * math.pi * level.k, abs=1e-9)

    def test_reflection_moves_levels(self, reference_profile):
        connected = bohr_sommerfeld_levels(reference_profile, 0.05, (0.0, 1.0), scan_points=SCAN)
        walled = bohr_sommerfeld_levels(reference_profile, 0.05, (0.0, 1.0), scan_points=SCAN,
                                        reflection="hard_wall")
        assert connected.energies[0] != pytest.approx(walled.energies[0], abs=1e-6)

    def test_phase_override(self, reference_profile):
        result = bohr_sommerfeld_levels(reference_profile, 0.05, (0.0, 1.0), phi=0.0,
                                        scan_points=SCAN)
        assert result.phi == 0.0
        assert len(result.branch(1)) == len(result.branch(-1))

    def test_table_reused_across_phases(self, reference_profile):
        shifted = replace(reference_profile, phi=1.1)
        a = bohr_sommerfeld_levels(shifted, 0.05, (0.0, 1.0), scan_points=SCAN)
        b = bohr_sommerfeld_levels(reference_profile, 0.05, (0.0, 1.0), phi=1.1, scan_points=SCAN)
        assert a.energies == pytest.approx(b.energies, abs=1e-14)

    def test_smaller_h_gives_more_levels(self, reference_profile):
        coarse = bohr_sommerfeld_levels(reference_profile, 0.1, (0.0, 1.0), scan_points=SCAN)
        fine = bohr_sommerfeld_levels(reference_profile, 0.03, (0.0, 1.0), scan_points=SCAN)
        assert len(fine.levels) > len(coarse.levels)

    def test_window_outside_gap(self, reference_profile):
        with pytest.raises(ProfileError):
            bohr_sommerfeld_levels(reference_profile, 0.05, (0.2, 1.2))

    @pytest.mark.slow
    def test_steep_ramp_approaches_hard_wall(self):
        steep = build_profile(1.0, 4.0, math.pi / 3, 0.99, 1.01, 1.0, ramp_shape=RampShape.LINEAR)
        bs = bohr_sommerfeld_levels(steep, 0.05, (0.0, 1.0), scan_points=SCAN)
        hw = hard_wall_levels(1.0, 4.0, math.pi / 3, 1.0, 0.05, (0.0, 1.0))
        assert abs(len(bs.levels) - len(hw.levels)) <= 1
        for energy in bs.energies[(bs.energies > 0.05) & (bs.energies < 0.95)]:
            assert np.min(np.abs(hw.energies - energy)) < 0.02


@pytest.mark.unit
class TestSupercurrent:
    """Test phase derivatives of the levels"""

    def test_zero_phase_has_no_current(self, reference_profile):
        entries = supercurrent(reference_profile, 0.05, 0.0, window=(0.05, 0.95), scan_points=SCAN)
        assert entries
        for entry in entries:
            assert not entry.flagged
            assert abs(entry.derivative) < 1e-6

    def test_branch_signs(self, reference_profile):
        entries = supercurrent(reference_profile, 0.05, math.pi / 2, window=(0.05, 0.95),
                               scan_points=SCAN)
        for entry in entries:
            assert not entry.flagged
            assert entry.branch * entry.derivative > 0
            expected = entry.branch / phase_slope(reference_profile, entry.energy, 0.05)
            assert entry.derivative == pytest.approx(expected, rel=1e-3)

    def test_step_refinement(self, reference_profile):
        coarse = supercurrent(reference_profile, 0.05, 1.0, dphi=1e-3, window=(0.05, 0.95),
                              scan_points=SCAN)
        fine = supercurrent(reference_profile, 0.05, 1.0, dphi=5e-4, window=(0.05, 0.95),
                            scan_points=SCAN)
        for a, b in zip(coarse, fine):
            assert a.derivative == pytest.approx(b.derivative, abs=1e-6)

    def test_invalid_step(self, reference_profile):
        with pytest.raises(ValueError):
            supercurrent(reference_profile, 0.05, 1.0, dphi=0.0)

    def test_rank_matching(self):
        entries = track_derivatives(_result([0.2, 0.5]), _result([0.201, 0.502]),
                                    _result([0.199, 0.498]), dphi=0.01)
        assert [e.derivative for e in entries] == pytest.approx([0.1, 0.2])
        assert not any(e.flagged for e in entries)

    def test_count_change_is_flagged(self):
        entries = track_derivatives(_result([0.2, 0.5]), _result([0.201, 0.502, 0.9]),
                                    _result([0.199, 0.498]), dphi=0.01)
        assert all(e.flagged for e in entries)
        assert entries[0].derivative == pytest.approx(0.1)

    def test_large_shift_is_flagged(self):
        entries = track_derivatives(_result([0.2, 0.3]), _result([0.26, 0.36]),
                                    _result([0.2, 0.3]), dphi=0.01)
        assert all(e.flagged for e in entries)

    def test_empty_neighbor_gives_nan(self):
        entries = track_derivatives(_result([0.2]), _result([]), _result([0.2]), dphi=0.01)
        assert entries[0].flagged
        assert math.isnan(entries[0].derivative)


@pytest.mark.unit
class TestWidthEstimate:
    """Test the semiclassical width estimate"""

    def test_hard_wall_is_rejected(self, hard_wall_profile):
        with pytest.raises(DegenerateSlopeError):
            width_estimate(hard_wall_profile, 0.5, 0.05)

    def test_exponent_scales_inversely_with_h(self, leaky_profile):
        coarse = width_estimate(leaky_profile, 0.5, 0.04)
        fine = width_estimate(leaky_profile, 0.5, 0.02)
        assert fine.bare_exponent == pytest.approx(2 * coarse.bare_exponent, rel=1e-12)
        assert fine.theta == pytest.approx(coarse.theta)

    def test_unit_slope_matches_wkb(self, leaky_profile):
        estimate = width_estimate(leaky_profile, 0.5, 0.03)
        assert estimate.alpha == pytest.approx(1.0, rel=1e-6)
        assert estimate.bare_exponent == pytest.approx(estimate.wkb_exponent, rel=1e-6)
        assert estimate.h_prime == pytest.approx(0.03, rel=1e-6)

    def test_gamma_composition(self, leaky_profile):
        estimate = width_estimate(leaky_profile, 0.4, 0.05)
        assert estimate.prefactor > 0
        assert estimate.gamma_estimate == pytest.approx(
            estimate.prefactor * math.exp(estimate.bare_exponent))
        assert estimate.wkb_exponent == pytest.approx(-2 * estimate.theta / 0.05)

    def test_prefactor_is_inverse_phase_slope(self, reference_profile):
        estimate = width_estimate(reference_profile, 0.5, 0.05)
        assert estimate.prefactor == pytest.approx(1.0 / phase_slope(reference_profile, 0.5, 0.05))

    def test_explicit_end(self, reference_profile):
        short = width_estimate(reference_profile, 0.5, 0.05)
        longer = width_estimate(reference_profile, 0.5, 0.05, x_end=2.5)
        assert longer.theta > short.theta
        assert longer.gamma_estimate < short.gamma_estimate
