"""
Tests for the sweep drivers behind the CLI subcommands

License: MIT
"""
import csv
import math
import os
from unittest import mock

import numpy as np
import pytest

import harness
from classical_geometry import barrier_exponent
from harness import (HARDWALL_LIMIT_COLUMNS, SPECTRUM_COLUMNS, WIDTH_SUMMARY_COLUMNS, CompareCell,
                     SweepContext, compare_report, fill_sweep_derivatives, fit_width_law,
                     run_hardwall, run_spectrum, run_table_d, run_widths, solve_levels)
from run_config import parse_config
from semiclassical_spectrum import Method, SpectrumResult
from solver_errors import ConfigError


def _read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _context(config_data, out_dir, **kwargs):
    return SweepContext(config=parse_config(config_data), out_dir=out_dir, **kwargs)


@pytest.fixture
def leaky_data(config_data):
    config_data["profile"].update(ramp_shape="linear", bank_edge=2.0)
    config_data.update({
        "h_list": [0.1],
        "window": [0.1, 0.9],
        "reference_energy": 0.5,
        "grid": {"X": 6.0, "N": 2999},
        "solvers": {"bohr_sommerfeld": True, "resonances": True},
    })
    return config_data


@pytest.mark.unit
class TestSolveLevels:
    """Test method dispatch"""

    def test_bohr_sommerfeld(self, config_data):
        result = solve_levels(parse_config(config_data), "bohr_sommerfeld", 0.1, 0.5)
        assert result.method == Method.BOHR_SOMMERFELD
        assert result.phi == 0.5
        assert result.levels

    def test_hard_wall_uses_lead_length(self, config_data):
        result = solve_levels(parse_config(config_data), "hard_wall", 0.1, 0.5)
        assert result.method == Method.HARD_WALL
        assert all(0.05 <= e <= 0.95 for e in result.energies)

    def test_direct_richardson(self, config_data):
        config_data["grid"] = {"X": 3.0, "N": 799, "richardson": True}
        config = parse_config(config_data)
        with mock.patch.object(harness, "richardson_levels",
                               wraps=harness.richardson_levels) as extrapolate:
            result = solve_levels(config, "direct", 0.1, 0.5)
        extrapolate.assert_called_once()
        assert result.method == Method.DIRECT
        assert result.phi == 0.5
        assert result.levels

    def test_unknown_method(self, config_data):
        with pytest.raises(ValueError) as exc_info:
            solve_levels(parse_config(config_data), "lanczos", 0.1, 0.5)
        assert "lanczos" in str(exc_info.value)


@pytest.mark.unit
class TestSpectrum:
    """Test the spectrum driver"""

    def test_writes_levels(self, config_data, temp_dir):
        ctx = _context(config_data, temp_dir)
        outcome = run_spectrum(ctx)
        rows = _read(outcome.files[0])
        assert outcome.files == [os.path.join(temp_dir, "spectrum.csv")]
        assert outcome.failures == 0
        assert len(rows) == outcome.rows > 0
        assert list(rows[0]) == SPECTRUM_COLUMNS
        assert {row["method"] for row in rows} == {"bohr_sommerfeld"}
        assert {row["h"] for row in rows} == {"0.1", "0.08"}
        assert all(float(row["gamma_est"]) > 0 for row in rows if row["gamma_est"])
        assert any(row["dE_dphi"] for row in rows)

    def test_hard_wall_rows_have_no_width_estimate(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": False, "hard_wall": True}
        rows = _read(run_spectrum(_context(config_data, temp_dir)).files[0])
        assert rows
        assert all(row["gamma_est"] == "" and row["theta"] == "" for row in rows)

    def test_derivatives_along_sweep(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": False, "hard_wall": True}
        config_data["h_list"] = [0.1]
        config_data["phi_list"] = [0.9, 1.0, 1.1]
        rows = _read(run_spectrum(_context(config_data, temp_dir)).files[0])
        middle = [row for row in rows if float(row["phi"]) == 1.0]
        ends = [row for row in rows if float(row["phi"]) != 1.0]
        assert all(row["dE_dphi"] == "" for row in ends)
        assert any(row["dE_dphi"] for row in middle)

    def test_no_methods(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": False}
        with pytest.raises(ConfigError) as exc_info:
            run_spectrum(_context(config_data, temp_dir))
        assert exc_info.value.field == "solvers"

    def test_gnuplot_scripts(self, config_data, temp_dir):
        outcome = run_spectrum(_context(config_data, temp_dir, emit_gnuplot=True))
        assert outcome.files[1] == os.path.join(temp_dir, "spectrum.gp")
        assert os.path.exists(outcome.files[1])

    def test_vector_dump(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": False, "direct": True}
        config_data["h_list"] = [0.1]
        config_data["grid"] = {"X": 3.0, "N": 599}
        config_data["window"] = [0.3, 0.6]
        config_data["output"] = {"dump_vectors": True}
        outcome = run_spectrum(_context(config_data, temp_dir))
        levels = _read(outcome.files[0])
        vectors = _read(os.path.join(temp_dir, "vectors.csv"))
        assert len(vectors) == 599 * len(levels)
        total = sum(float(r["u_abs2"]) + float(r["v_abs2"]) for r in vectors if r["k"] == levels[0]["k"])
        assert total == pytest.approx(1.0, rel=1e-6)

    def test_progress_follows_current_sweep(self, config_data, temp_dir):
        ctx = _context(config_data, temp_dir)
        assert ctx.progress() == {"state": "idle"}
        run_spectrum(ctx)
        assert ctx.progress()["sweep_id"] == "spectrum"
        assert ctx.progress()["completed"] == 2


@pytest.mark.unit
def test_fill_sweep_derivatives():
    rows = [{"method": "direct", "h": 0.1, "branch": 0, "k": 0, "phi": phi, "E_k": 0.5 + 0.1 * phi,
             "dE_dphi": None} for phi in (0.0, 0.5, 1.0)]
    rows.append({"method": "direct", "h": 0.1, "branch": 0, "k": 1, "phi": 0.5, "E_k": 0.8,
                 "dE_dphi": None})
    fill_sweep_derivatives(rows, [1.0, 0.0, 0.5])
    assert rows[0]["dE_dphi"] is None
    assert rows[1]["dE_dphi"] == pytest.approx(0.1)
    assert rows[2]["dE_dphi"] is None
    assert rows[3]["dE_dphi"] is None


@pytest.mark.unit
class TestWidthLaw:
    """Test the ln Gamma against 1/h fit"""

    H_LIST = [0.1, 0.09, 0.08, 0.07]

    def _rows(self, profile, slope=-3.0, below_floor=False):
        barrier = barrier_exponent(profile, 0.5).total
        return [{"h": h, "E_k": 0.5, "barrier": barrier, "gamma_direct": math.exp(slope / h + 1.0),
                 "below_floor": below_floor} for h in self.H_LIST]

    def test_exact_line(self, leaky_profile):
        summary = fit_width_law(leaky_profile, self._rows(leaky_profile), self.H_LIST, 0.5)
        assert summary["status"] == "ok"
        assert summary["points"] == 4
        assert summary["slope"] == pytest.approx(-3.0, rel=1e-10)
        assert summary["intercept"] == pytest.approx(1.0, rel=1e-8)
        assert summary["r_squared"] == pytest.approx(1.0)
        assert list(summary) == WIDTH_SUMMARY_COLUMNS

    def test_predicted_slopes(self, leaky_profile):
        summary = fit_width_law(leaky_profile, self._rows(leaky_profile), self.H_LIST, 0.5)
        barrier = barrier_exponent(leaky_profile, 0.5).total
        assert summary["predicted_slope_wkb"] == pytest.approx(-2.0 * barrier)
        # unit slope on the linear ramp
        assert summary["predicted_slope"] == pytest.approx(-2.0 * barrier)

    def test_energy_drift_corrected(self, leaky_profile):
        rows = self._rows(leaky_profile)
        drifted = rows[0]
        drifted["E_k"] = 0.55
        drifted["barrier"] = barrier_exponent(leaky_profile, 0.55).total
        correction = 2.0 * (drifted["barrier"] - barrier_exponent(leaky_profile, 0.5).total) / drifted["h"]
        drifted["gamma_direct"] *= math.exp(-correction)
        summary = fit_width_law(leaky_profile, rows, self.H_LIST, 0.5)
        assert summary["slope"] == pytest.approx(-3.0, rel=1e-8)

    def test_tracks_level_nearest_reference(self, leaky_profile):
        rows = self._rows(leaky_profile)
        rows.append(dict(rows[0], E_k=0.9, gamma_direct=1.0))
        summary = fit_width_law(leaky_profile, rows, self.H_LIST, 0.5)
        assert summary["slope"] == pytest.approx(-3.0, rel=1e-10)

    def test_no_levels(self, leaky_profile):
        assert fit_width_law(leaky_profile, [], self.H_LIST, 0.5)["status"] == "no levels"

    def test_too_few_h_values(self, leaky_profile):
        summary = fit_width_law(leaky_profile, self._rows(leaky_profile), self.H_LIST[:3], 0.5)
        assert summary["status"] == "refused: fewer than 4 h values"
        assert summary["slope"] is None

    def test_below_floor_excluded(self, leaky_profile):
        rows = self._rows(leaky_profile)
        rows[-1]["below_floor"] = True
        summary = fit_width_law(leaky_profile, rows, self.H_LIST, 0.5)
        assert summary["status"] == "refused: fewer than 4 usable widths"
        assert summary["points"] == 3

    def test_escaped_excluded(self, leaky_profile):
        rows = self._rows(leaky_profile)
        for row in rows:
            row["escaped"] = False
        rows.insert(0, dict(rows[0], gamma_direct=1.0, escaped=True))
        summary = fit_width_law(leaky_profile, rows, self.H_LIST, 0.5)
        assert summary["slope"] == pytest.approx(-3.0, rel=1e-10)
        rows[1]["escaped"] = True
        summary = fit_width_law(leaky_profile, rows, self.H_LIST, 0.5)
        assert summary["points"] == 3


@pytest.mark.unit
class TestWidthsDriver:
    """Test the widths driver"""

    def test_requires_resonance_solver(self, leaky_data, temp_dir):
        leaky_data["solvers"] = {"bohr_sommerfeld": True}
        with pytest.raises(ConfigError) as exc_info:
            run_widths(_context(leaky_data, temp_dir))
        assert exc_info.value.field == "solvers"

    def test_single_h(self, leaky_data, temp_dir):
        outcome = run_widths(_context(leaky_data, temp_dir))
        rows = _read(outcome.files[0])
        summary = _read(outcome.files[1])[0]
        assert rows
        assert all(float(row["gamma_direct"]) > 0 for row in rows)
        assert all(row["escaped"] == "false" for row in rows)
        assert all(float(row["alpha"]) == pytest.approx(1.0) for row in rows)
        assert summary["status"] == "refused: fewer than 4 h values"
        assert outcome.report == summary["status"]

    def test_no_levels_in_window(self, leaky_data, temp_dir):
        empty = SpectrumResult(levels=[], method=Method.BOHR_SOMMERFELD, h=0.1, phi=0.0)
        with mock.patch.object(harness, "solve_levels", return_value=empty):
            outcome = run_widths(_context(leaky_data, temp_dir))
        assert outcome.rows == 0
        assert outcome.report == "no levels"

    @pytest.mark.slow
    def test_width_law_fit(self, leaky_data, temp_dir):
        leaky_data["h_list"] = [0.1, 0.09, 0.08, 0.07]
        outcome = run_widths(_context(leaky_data, temp_dir, jobs=2))
        summary = _read(outcome.files[1])[0]
        assert summary["status"] == "ok"
        assert int(summary["points"]) == 4
        assert float(summary["slope"]) < 0
        assert float(summary["predicted_slope"]) < 0


@pytest.mark.unit
class TestCompare:
    """Test the comparison report"""

    def test_pass(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": True, "hard_wall": True}
        config_data["h_list"] = [0.1]
        config_data["acceptance"] = {"hardwall_bs_max": 100.0}
        outcome = compare_report(_context(config_data, temp_dir))
        rows = _read(outcome.files[0])
        assert outcome.passed
        assert "Acceptance: PASS" in outcome.report
        assert rows
        assert all(row["E_direct"] == "" for row in rows)
        paired = [row for row in rows if row["hardwall_bs"]]
        assert paired
        assert all(float(row["hardwall_bs"]) >= 0 for row in paired)
        with open(outcome.files[1]) as f:
            assert f.read() == outcome.report

    def test_hard_wall_threshold_violated(self, config_data, temp_dir):
        config_data["solvers"] = {"bohr_sommerfeld": True, "hard_wall": True}
        config_data["h_list"] = [0.1]
        config_data["acceptance"] = {"hardwall_bs_max": 1e-12}
        outcome = compare_report(_context(config_data, temp_dir))
        assert not outcome.passed
        assert "Acceptance: FAIL" in outcome.report
        assert "hard-wall deviation" in outcome.report

    def test_needs_two_methods(self, config_data, temp_dir):
        with pytest.raises(ConfigError):
            compare_report(_context(config_data, temp_dir))

    def test_unpaired_edge_level(self):
        reference = np.array([0.2, 0.5, 0.97])
        direct = np.array([0.21, 0.52])
        assert harness._partner(0.2, direct, reference) == 0.21
        assert harness._partner(0.5, direct, reference) == 0.52
        assert harness._partner(0.97, direct, reference) is None
        assert harness._partner(0.5, np.array([]), reference) is None

    def test_non_monotone_error_fails(self, config_data):
        config = parse_config(config_data)
        cells = [
            CompareCell(h=0.1, phi=0.0, counts={"bohr_sommerfeld": 3, "direct": 3}, max_bs_direct=1e-3),
            CompareCell(h=0.05, phi=0.0, counts={"bohr_sommerfeld": 5, "direct": 4}, max_bs_direct=2e-3),
        ]
        passed, report = harness._acceptance_report(config, cells, failures=1)
        assert not passed
        assert "[level count mismatch]" in report
        assert "monotone decrease of max|BS-direct| as h shrinks: false" in report
        assert "1 solver task(s) failed" in report

    def test_monotone_error_passes(self, config_data):
        config = parse_config(config_data)
        cells = [
            CompareCell(h=0.1, phi=0.0, counts={"bohr_sommerfeld": 3, "direct": 3}, max_bs_direct=4e-3),
            CompareCell(h=0.05, phi=0.0, counts={"bohr_sommerfeld": 5, "direct": 5}, max_bs_direct=1e-3),
        ]
        passed, report = harness._acceptance_report(config, cells, failures=0)
        assert passed
        assert "true" in report


@pytest.mark.unit
class TestHardwall:
    """Test the hard-wall driver"""

    @pytest.fixture
    def steep_data(self, config_data):
        config_data["profile"].update(x1=0.99, x2=1.01, ramp_shape="linear", phi=0.0)
        config_data.update({
            "h_list": [0.1], "phi_list": [0.0],
            "solvers": {"bohr_sommerfeld": True, "hard_wall": True},
            "hardwall_widths": [0.2, 0.05],
        })
        return config_data

    def test_levels_and_limit(self, steep_data, temp_dir):
        outcome = run_hardwall(_context(steep_data, temp_dir))
        levels = _read(outcome.files[0])
        limit = _read(outcome.files[1])
        assert outcome.files[1] == os.path.join(temp_dir, "hardwall_limit.csv")
        assert {row["method"] for row in levels} == {"hard_wall"}
        assert [float(row["width"]) for row in limit] == [0.2, 0.05]
        assert list(limit[0]) == HARDWALL_LIMIT_COLUMNS
        assert all(int(row["levels"]) > 0 for row in limit)

    def test_without_bohr_sommerfeld(self, steep_data, temp_dir):
        steep_data["solvers"] = {"bohr_sommerfeld": False, "hard_wall": True}
        outcome = run_hardwall(_context(steep_data, temp_dir))
        assert outcome.files == [os.path.join(temp_dir, "hardwall.csv")]


@pytest.mark.unit
def test_table_d(config_data, temp_dir):
    config_data["table_d"] = {"nu_list": [0.0, 1.0], "points": 5}
    outcome = run_table_d(_context(config_data, temp_dir))
    rows = _read(outcome.files[0])
    assert outcome.rows == 10
    origin = [row for row in rows if float(row["nu"]) == 0.0 and float(row["z_re"]) == 0.0]
    assert float(origin[0]["D_re"]) == pytest.approx(1.0, rel=1e-10)
    assert [float(row["nu"]) for row in rows] == [0.0] * 5 + [1.0] * 5
