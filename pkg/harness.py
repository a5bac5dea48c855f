"""
Sweep drivers behind the CLI subcommands

Each driver turns a RunConfig into independent tasks, runs them through a
SweepPipeline, post-processes the collected rows and writes CSV files (plus
optional gnuplot scripts) into the output directory.

License: MIT
"""
import dataclasses
import logging
import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from classical_geometry import barrier_exponent, local_slope
from diagnostics import NoOpDiagnostics, SolverDiagnostics
from direct_solver import (WIDTH_FLOOR, bound_states, discretize, resonances_complex_scaling,
                           richardson_levels, shooting_resonance)
from junction_model import JunctionProfile, RampShape
from run_config import RunConfig
from semiclassical_spectrum import (Method, SpectrumResult, bohr_sommerfeld_levels,
                                    hard_wall_levels, track_derivatives, width_estimate)
from solver_errors import AndreevError, ConfigError, DegenerateSlopeError
from special_functions import tabulate_D
from sweep_interfaces import Row, SweepTask
from sweep_io import (MemoryResultSink, TaskListSource, grid_tasks, write_csv,
                      write_gnuplot_script)
from sweep_pipeline import SweepPipeline

logger = logging.getLogger(__name__)

try:
    import metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False

SPECTRUM_COLUMNS = ["method", "h", "phi", "k", "branch", "E_k", "residual", "dE_dphi",
                    "gamma_est", "theta"]
VECTOR_COLUMNS = ["h", "phi", "k", "E_k", "x", "u_abs2", "v_abs2"]
WIDTH_COLUMNS = ["h", "k", "branch", "E_k", "E_re", "gamma_direct", "gamma_shooting", "barrier",
                 "alpha", "bare_exponent", "scaling_angle", "stability", "escaped", "below_floor"]
WIDTH_SUMMARY_COLUMNS = ["reference_energy", "points", "slope", "intercept", "r_squared",
                         "predicted_slope", "predicted_slope_wkb", "status"]
COMPARE_COLUMNS = ["h", "phi", "rank", "E_bs", "E_direct", "E_hardwall", "bs_direct",
                   "hardwall_bs", "counts"]
HARDWALL_LIMIT_COLUMNS = ["width", "h", "phi", "levels", "max_deviation"]
TABLE_D_COLUMNS = ["nu", "z_re", "z_im", "D_re", "D_im"]

MIN_FIT_POINTS = 4


@dataclass
class SweepContext:
    """Everything a driver needs besides the configuration"""
    config: RunConfig
    out_dir: str
    jobs: int = 1
    diagnostics: SolverDiagnostics = field(default_factory=NoOpDiagnostics)
    enable_metrics: bool = False
    emit_gnuplot: bool = False
    current: Optional[SweepPipeline] = None

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def progress(self) -> Dict:
        if self.current is None:
            return {"state": "idle"}
        return self.current.progress()


@dataclass
class RunOutcome:
    files: List[str]
    rows: int = 0
    failures: int = 0
    passed: bool = True
    report: str = ""


def _run_sweep(ctx: SweepContext, source: TaskListSource,
               solver: Callable[[SweepTask], List[Row]], sweep_id: str) -> Tuple[MemoryResultSink, int]:
    sink = MemoryResultSink()
    pipeline = SweepPipeline(source, sink, solver, jobs=ctx.jobs, diagnostics=ctx.diagnostics,
                             enable_metrics=ctx.enable_metrics, sweep_id=sweep_id)
    ctx.current = pipeline
    try:
        pipeline.run()
    finally:
        pipeline.cleanup()
    for task, error in sorted(pipeline.failures, key=lambda item: item[0].sort_key):
        logger.warning(f"Skipped {task.method} h={task.h} phi={task.phi}: {type(error).__name__}: {error}")
    return sink, len(pipeline.failures)


def _with_phase(profile: JunctionProfile, phi: float) -> JunctionProfile:
    return dataclasses.replace(profile, phi=phi)


def solve_levels(config: RunConfig, method: str, h: float, phi: float,
                 return_vectors: bool = False) -> SpectrumResult:
    """Levels of one method at one (h, phi) inside the configured window"""
    profile = _with_phase(config.profile, phi)
    if method == Method.BOHR_SOMMERFELD.value:
        return bohr_sommerfeld_levels(profile, h, config.window, tol_root=config.tol_root,
                                      tol_quad=config.tol_quad, scan_points=config.scan_points)
    if method == Method.HARD_WALL.value:
        return hard_wall_levels(profile.delta0, profile.mu0, phi, profile.lead_half_length, h,
                                config.window, tol_root=config.tol_root,
                                scan_points=config.scan_points)
    if method == Method.DIRECT.value:
        if config.grid.richardson and not return_vectors:
            return richardson_levels(profile, h, config.grid.X, config.grid.N, config.window)
        op = discretize(profile, h, config.grid.X, config.grid.N)
        return bound_states(op, config.window, return_vectors=return_vectors)
    raise ValueError(f"Unknown method: {method}")


def _enabled_methods(config: RunConfig) -> List[str]:
    toggles = config.solvers
    methods = []
    if toggles.bohr_sommerfeld:
        methods.append(Method.BOHR_SOMMERFELD.value)
    if toggles.hard_wall:
        methods.append(Method.HARD_WALL.value)
    if toggles.direct:
        methods.append(Method.DIRECT.value)
    return methods


def _level_rows(config: RunConfig, task: SweepTask, result: SpectrumResult,
                derivatives: Optional[List[float]] = None) -> List[Row]:
    smooth = config.profile.ramp_shape != RampShape.HARD_WALL
    rows = []
    for i, level in enumerate(result.levels):
        row = {
            "method": task.method, "h": task.h, "phi": task.phi, "k": level.k,
            "branch": level.branch, "E_k": level.energy, "residual": level.residual,
            "dE_dphi": derivatives[i] if derivatives else None,
            "gamma_est": None, "theta": None,
        }
        if task.method == Method.BOHR_SOMMERFELD.value and smooth:
            try:
                estimate = width_estimate(_with_phase(config.profile, task.phi), level.energy, task.h,
                                          tol_quad=config.tol_quad)
                row["gamma_est"] = estimate.gamma_estimate
                row["theta"] = estimate.theta
            except DegenerateSlopeError as e:
                logger.debug(f"No width estimate at E={level.energy:.6g}: {e}")
        rows.append(row)
    return rows


def _vector_rows(task: SweepTask, result: SpectrumResult, x: np.ndarray) -> List[Row]:
    rows = []
    for i, level in enumerate(result.levels):
        vector = result.vectors[:, i]
        u_abs2 = np.abs(vector[0::2]) ** 2
        v_abs2 = np.abs(vector[1::2]) ** 2
        for j in range(len(x)):
            rows.append({"table": "vectors", "h": task.h, "phi": task.phi, "k": level.k,
                         "E_k": level.energy, "x": float(x[j]),
                         "u_abs2": float(u_abs2[j]), "v_abs2": float(v_abs2[j])})
    return rows


def fill_sweep_derivatives(rows: List[Row], phi_list: Sequence[float]) -> None:
    """
    Centered differences of E_k along the phase sweep.

    Rows are matched across phases by (method, h, branch, k); the first and
    last phase of the sweep stay empty.
    """
    phases = sorted(set(phi_list))
    position = {phi: i for i, phi in enumerate(phases)}
    series = defaultdict(dict)
    for row in rows:
        series[(row["method"], row["h"], row["branch"], row["k"])][row["phi"]] = row

    for by_phase in series.values():
        for phi, row in by_phase.items():
            i = position[phi]
            if i == 0 or i == len(phases) - 1:
                continue
            before, after = phases[i - 1], phases[i + 1]
            if before in by_phase and after in by_phase:
                row["dE_dphi"] = (by_phase[after]["E_k"] - by_phase[before]["E_k"]) / (after - before)


def _emit(ctx: SweepContext, path: str, x_expr: str, y_expr: str, xlabel: str, ylabel: str,
          files: List[str]):
    if ctx.emit_gnuplot:
        files.append(write_gnuplot_script(path, x_expr, y_expr, xlabel, ylabel))


def run_spectrum(ctx: SweepContext) -> RunOutcome:
    """
    One row per (method, h, phi, level) with E_k, residual and dE/dphi.

    dE/dphi comes from centered differences along the phase sweep when
    phi_list has at least three points, otherwise from re-solving at
    phi +/- dphi.
    """
    config = ctx.config
    methods = _enabled_methods(config)
    if not methods:
        raise ConfigError("solvers", "spectrum needs at least one of bohr_sommerfeld, hard_wall, direct")
    along_sweep = len(set(config.phi_list)) >= 3

    def solve(task: SweepTask) -> List[Row]:
        dump = config.output.dump_vectors and task.method == Method.DIRECT.value
        result = solve_levels(config, task.method, task.h, task.phi, return_vectors=dump)
        derivatives = None
        if not along_sweep:
            plus = solve_levels(config, task.method, task.h, task.phi + config.dphi)
            minus = solve_levels(config, task.method, task.h, task.phi - config.dphi)
            derivatives = [entry.derivative for entry in track_derivatives(result, plus, minus, config.dphi)]
        rows = _level_rows(config, task, result, derivatives)
        if dump and result.vectors is not None:
            grid = np.linspace(-config.grid.X, config.grid.X, config.grid.N + 2)[1:-1]
            rows.extend(_vector_rows(task, result, grid))
        return rows

    source = grid_tasks("spectrum", methods, config.h_list, config.phi_list)
    sink, failures = _run_sweep(ctx, source, solve, "spectrum")
    rows = sink.rows("main")
    if along_sweep:
        fill_sweep_derivatives(rows, config.phi_list)

    files = [write_csv(ctx.path(config.output.spectrum), SPECTRUM_COLUMNS, rows)]
    _emit(ctx, files[0], 'column("phi")', 'column("E_k")', "phi", "E_k", files)
    if config.output.dump_vectors:
        files.append(write_csv(ctx.path(config.output.vectors), VECTOR_COLUMNS, sink.rows("vectors")))
    return RunOutcome(files=files, rows=len(rows), failures=failures)


def run_hardwall(ctx: SweepContext) -> RunOutcome:
    """
    Hard-wall levels, plus the approach of Bohr-Sommerfeld levels on steep
    linear ramps of the configured widths (centered at L) when enabled.
    """
    config = ctx.config
    base = config.profile
    along_sweep = len(set(config.phi_list)) >= 3
    hard_wall = Method.HARD_WALL.value

    def solve(task: SweepTask) -> List[Row]:
        if task.method == hard_wall:
            result = solve_levels(config, hard_wall, task.h, task.phi)
            derivatives = None
            if not along_sweep:
                plus = solve_levels(config, hard_wall, task.h, task.phi + config.dphi)
                minus = solve_levels(config, hard_wall, task.h, task.phi - config.dphi)
                derivatives = [e.derivative for e in track_derivatives(result, plus, minus, config.dphi)]
            return _level_rows(config, task, result, derivatives)

        width = config.hardwall_widths[task.index]
        L = base.lead_half_length
        bank_edge = base.bank_edge if base.bank_edge and base.bank_edge > L + 0.5 * width else None
        steep = dataclasses.replace(base, phi=task.phi, x1=L - 0.5 * width, x2=L + 0.5 * width,
                                    ramp_shape=RampShape.LINEAR, bank_edge=bank_edge)
        smooth = bohr_sommerfeld_levels(steep, task.h, config.window, tol_root=config.tol_root,
                                        tol_quad=config.tol_quad, scan_points=config.scan_points)
        wall = solve_levels(config, hard_wall, task.h, task.phi)
        return [{"table": "limit", "width": width, "h": task.h, "phi": task.phi,
                 "levels": len(smooth.levels),
                 "max_deviation": _max_nearest_gap(smooth.energies, wall.energies)}]

    tasks = list(grid_tasks("hardwall", [hard_wall], config.h_list, config.phi_list).tasks)
    if config.solvers.bohr_sommerfeld:
        tasks += [SweepTask("hardwall", "steep_ramp", h, phi, i)
                  for i in range(len(config.hardwall_widths))
                  for h in config.h_list for phi in config.phi_list]
    sink, failures = _run_sweep(ctx, TaskListSource(tasks), solve, "hardwall")

    rows = sink.rows("main")
    if along_sweep:
        fill_sweep_derivatives(rows, config.phi_list)
    files = [write_csv(ctx.path(config.output.hardwall), SPECTRUM_COLUMNS, rows)]
    _emit(ctx, files[0], 'column("phi")', 'column("E_k")', "phi", "E_k", files)

    if config.solvers.bohr_sommerfeld:
        limit_rows = sorted(sink.rows("limit"), key=lambda r: (-r["width"], r["h"], r["phi"]))
        path = write_csv(ctx.path(config.output.hardwall_limit), HARDWALL_LIMIT_COLUMNS, limit_rows)
        files.append(path)
        _emit(ctx, path, 'column("width")', 'column("max_deviation")', "ramp width",
              "max |E_BS - E_hardwall|", files)
        worst = [max((r["max_deviation"] for r in limit_rows if r["width"] == w), default=math.nan)
                 for w in sorted(set(config.hardwall_widths), reverse=True)]
        logger.info(f"Hard-wall approach, widest to steepest ramp: {worst}")
    return RunOutcome(files=files, rows=len(rows), failures=failures)


def _nearest(value: float, candidates: np.ndarray) -> Optional[float]:
    if candidates.size == 0:
        return None
    return float(candidates[np.argmin(np.abs(candidates - value))])


def _partner(value: float, candidates: np.ndarray, reference: np.ndarray) -> Optional[float]:
    """Nearest candidate, provided value is in turn its nearest reference level"""
    match = _nearest(value, candidates)
    if match is None or _nearest(match, reference) != value:
        return None
    return match


def _max_nearest_gap(energies: np.ndarray, reference: np.ndarray) -> float:
    if energies.size == 0 or reference.size == 0:
        return math.nan
    return float(max(abs(e - _nearest(e, reference)) for e in energies))


def run_widths(ctx: SweepContext) -> RunOutcome:
    """
    Resonance widths per (h, level) and the slope of ln Gamma against 1/h.

    Seeds are the Bohr-Sommerfeld levels at the first phase of phi_list;
    widths come from complex scaling at the first angle of theta_list, with
    shooting as a second opinion when enabled.
    """
    config = ctx.config
    toggles = config.solvers
    if not (toggles.bohr_sommerfeld and (toggles.direct or toggles.resonances)):
        raise ConfigError("solvers", "widths needs bohr_sommerfeld and direct or resonances enabled")
    phi = config.phi_list[0]
    theta = config.theta_list[0]
    profile = _with_phase(config.profile, phi)

    def solve(task: SweepTask) -> List[Row]:
        levels = solve_levels(config, Method.BOHR_SOMMERFELD.value, task.h, phi).levels
        if not levels:
            return []
        resonances = resonances_complex_scaling(profile, task.h, [lv.energy for lv in levels], theta,
                                                X=config.grid.X, N=config.grid.N)
        if ctx.enable_metrics and METRICS_AVAILABLE:
            metrics.record_resonances("complex_scaling", len(resonances))
        rows = []
        for level, resonance in zip(levels, resonances):
            gamma_shooting = None
            if toggles.shooting:
                try:
                    gamma_shooting = shooting_resonance(profile, task.h, resonance.energy_complex).gamma
                except AndreevError as e:
                    logger.warning(f"Shooting failed near E={level.energy:.6g}, h={task.h}: {e}")
            barrier = barrier_exponent(profile, level.energy, tol_quad=config.tol_quad).total
            try:
                alpha = local_slope(profile, level.energy).alpha
            except DegenerateSlopeError:
                alpha = math.nan
            rows.append({
                "h": task.h, "k": level.k, "branch": level.branch, "E_k": level.energy,
                "E_re": resonance.energy_complex.real, "gamma_direct": resonance.gamma,
                "gamma_shooting": gamma_shooting, "barrier": barrier, "alpha": alpha,
                "bare_exponent": -2.0 * barrier / (alpha * task.h),
                "scaling_angle": theta, "stability": resonance.stability,
                "escaped": resonance.escaped, "below_floor": resonance.gamma < WIDTH_FLOOR,
            })
        return rows

    source = TaskListSource(SweepTask("widths", "complex_scaling", h, phi) for h in config.h_list)
    sink, failures = _run_sweep(ctx, source, solve, "widths")
    rows = sink.rows()

    files = [write_csv(ctx.path(config.output.widths), WIDTH_COLUMNS, rows)]
    _emit(ctx, files[0], '1.0/column("h")', 'log(column("gamma_direct"))', "1/h", "ln Gamma", files)
    summary = fit_width_law(profile, rows, config.h_list, config.reference_energy or 0.5 * sum(config.window),
                            config.tol_quad)
    files.append(write_csv(ctx.path(config.output.widths_summary), WIDTH_SUMMARY_COLUMNS, [summary]))
    logger.info(f"Width law: {summary['status']}, slope={summary['slope']}, "
                f"predicted={summary['predicted_slope']}")
    return RunOutcome(files=files, rows=len(rows), failures=failures, report=summary["status"])


def fit_width_law(profile: JunctionProfile, rows: List[Row], h_list: Sequence[float],
                  reference_energy: float, tol_quad: float = 1e-10) -> Row:
    """
    Least-squares slope of the energy-referenced ln Gamma against 1/h.

    For each h the level nearest the reference energy is tracked and its
    width corrected by 2(Theta(E_k) - Theta(E_ref))/(alpha h), which removes
    the drift of the tracked energy. Below-floor and escaped resonances are
    excluded.

    Returns:
        Summary row with slope, intercept, R^2 and the predicted slopes
        -2 Theta/alpha and -2 Theta at the reference energy
    """
    barrier_ref = barrier_exponent(profile, reference_energy, tol_quad=tol_quad).total
    try:
        alpha_ref = local_slope(profile, reference_energy).alpha
    except DegenerateSlopeError:
        alpha_ref = math.inf
    summary = {
        "reference_energy": reference_energy, "points": 0, "slope": None, "intercept": None,
        "r_squared": None, "predicted_slope": -2.0 * barrier_ref / alpha_ref,
        "predicted_slope_wkb": -2.0 * barrier_ref, "status": "ok",
    }
    if not rows:
        summary["status"] = "no levels"
        return summary
    if len(set(h_list)) < MIN_FIT_POINTS:
        summary["status"] = f"refused: fewer than {MIN_FIT_POINTS} h values"
        return summary

    x_values, y_values = [], []
    for h in sorted(set(row["h"] for row in rows)):
        usable = [r for r in rows
                  if r["h"] == h and not r["below_floor"] and not r.get("escaped", False)]
        if not usable:
            continue
        tracked = min(usable, key=lambda r: abs(r["E_k"] - reference_energy))
        correction = 2.0 * (tracked["barrier"] - barrier_ref) / (alpha_ref * h)
        x_values.append(1.0 / h)
        y_values.append(math.log(tracked["gamma_direct"]) + correction)

    summary["points"] = len(x_values)
    if len(x_values) < MIN_FIT_POINTS:
        summary["status"] = f"refused: fewer than {MIN_FIT_POINTS} usable widths"
        return summary
    fit = stats.linregress(x_values, y_values)
    summary.update(slope=float(fit.slope), intercept=float(fit.intercept),
                   r_squared=float(fit.rvalue ** 2))
    return summary


@dataclass
class CompareCell:
    h: float
    phi: float
    counts: Dict[str, int]
    max_bs_direct: Optional[float] = None
    max_hardwall_bs: Optional[float] = None

    @property
    def mismatched(self) -> bool:
        return len(set(self.counts.values())) > 1


def compare_report(ctx: SweepContext) -> RunOutcome:
    """
    Tabulate |E_BS - E_direct| and |E_hardwall - E_BS| per level.

    Levels of the reference method (Bohr-Sommerfeld when enabled) are paired
    with the nearest level of each other method when the two are mutual
    nearest neighbours; levels left unpaired near the gap edge show up as a
    count mismatch with empty cells. The outcome fails when an
    acceptance threshold is violated.
    """
    config = ctx.config
    methods = _enabled_methods(config)
    if len(methods) < 2:
        raise ConfigError("solvers", "compare needs at least two of bohr_sommerfeld, hard_wall, direct")

    def solve(task: SweepTask) -> List[Row]:
        result = solve_levels(config, task.method, task.h, task.phi)
        return [{"method": task.method, "h": task.h, "phi": task.phi, "E_k": e} for e in result.energies]

    sink, failures = _run_sweep(ctx, grid_tasks("compare", methods, config.h_list, config.phi_list),
                                solve, "compare")
    energies = defaultdict(list)
    for row in sink.rows():
        energies[(row["method"], row["h"], row["phi"])].append(row["E_k"])

    reference = methods[0]
    bs, direct, wall = Method.BOHR_SOMMERFELD.value, Method.DIRECT.value, Method.HARD_WALL.value
    rows, cells = [], []
    for h in config.h_list:
        for phi in config.phi_list:
            found = {m: np.array(sorted(energies.get((m, h, phi), []))) for m in methods}
            cell = CompareCell(h=h, phi=phi, counts={m: int(found[m].size) for m in methods})
            counts_text = ";".join(f"{m}={cell.counts[m]}" for m in methods)
            for rank, energy in enumerate(found[reference]):
                e_bs = energy if reference == bs else None
                e_direct = _partner(energy, found[direct], found[reference]) if direct in found else None
                e_wall = _partner(energy, found[wall], found[reference]) if wall in found else None
                bs_direct = abs(e_bs - e_direct) if e_bs is not None and e_direct is not None else None
                wall_bs = abs(e_wall - e_bs) if e_bs is not None and e_wall is not None else None
                rows.append({"h": h, "phi": phi, "rank": rank, "E_bs": e_bs, "E_direct": e_direct,
                             "E_hardwall": e_wall, "bs_direct": bs_direct, "hardwall_bs": wall_bs,
                             "counts": counts_text})
                if bs_direct is not None:
                    cell.max_bs_direct = max(cell.max_bs_direct or 0.0, bs_direct)
                if wall_bs is not None:
                    cell.max_hardwall_bs = max(cell.max_hardwall_bs or 0.0, wall_bs)
            cells.append(cell)

    passed, report = _acceptance_report(config, cells, failures)
    files = [write_csv(ctx.path(config.output.compare), COMPARE_COLUMNS, rows)]
    _emit(ctx, files[0], 'column("h")', 'column("bs_direct")', "h", "|E_BS - E_direct|", files)
    text_path = ctx.path(config.output.compare_text)
    with open(text_path, "w", encoding="utf-8") as f:
        f.write(report)
    files.append(text_path)
    return RunOutcome(files=files, rows=len(rows), failures=failures, passed=passed, report=report)


def _acceptance_report(config: RunConfig, cells: List[CompareCell], failures: int) -> Tuple[bool, str]:
    delta0 = config.profile.delta0
    limits = config.acceptance
    lines = ["=" * 60, "COMPARISON REPORT", "=" * 60]
    for cell in cells:
        counts = ", ".join(f"{m}={n}" for m, n in cell.counts.items())
        line = f"h={cell.h:g} phi={cell.phi:.6g}: levels {counts}"
        if cell.max_bs_direct is not None:
            line += f"  max|BS-direct|={cell.max_bs_direct:.3e}"
        if cell.max_hardwall_bs is not None:
            line += f"  max|HW-BS|={cell.max_hardwall_bs:.3e}"
        if cell.mismatched:
            line += "  [level count mismatch]"
        lines.append(line)

    reasons = []
    if failures:
        reasons.append(f"{failures} solver task(s) failed")
    by_phase = defaultdict(list)
    for cell in cells:
        if cell.max_bs_direct is not None:
            by_phase[cell.phi].append((cell.h, cell.max_bs_direct))
    for phi, series in sorted(by_phase.items()):
        series.sort(key=lambda item: -item[0])
        errors = [err for _, err in series]
        monotone = all(later < earlier for earlier, later in zip(errors, errors[1:]))
        lines.append(f"phi={phi:.6g}: monotone decrease of max|BS-direct| as h shrinks: "
                     f"{'true' if monotone else 'false'}")
        if limits.require_monotone and not monotone:
            reasons.append(f"BS-direct error not monotone at phi={phi:.6g}")
        if errors[-1] > limits.bs_direct_max * delta0:
            reasons.append(f"BS-direct error {errors[-1]:.3e} at h={series[-1][0]:g} exceeds "
                           f"{limits.bs_direct_max:g} delta0")
    wall_errors = [c.max_hardwall_bs for c in cells if c.max_hardwall_bs is not None]
    if wall_errors and max(wall_errors) > limits.hardwall_bs_max * delta0:
        reasons.append(f"hard-wall deviation {max(wall_errors):.3e} exceeds {limits.hardwall_bs_max:g} delta0")

    passed = not reasons
    lines.append("-" * 60)
    lines.append(f"Acceptance: {'PASS' if passed else 'FAIL'}")
    lines.extend(f"  - {reason}" for reason in reasons)
    lines.append("=" * 60)
    return passed, "\n".join(lines) + "\n"


def run_table_d(ctx: SweepContext) -> RunOutcome:
    """Tabulate D_nu on a line of arguments z = t + i z_imag for each configured order"""
    config = ctx.config
    table = config.table_d
    z_values = np.linspace(table.z_min, table.z_max, table.points) + 1j * table.z_imag

    def solve(task: SweepTask) -> List[Row]:
        return tabulate_D([table.nu_list[task.index]], z_values)

    source = TaskListSource(SweepTask("table-D", "series", index=i) for i in range(len(table.nu_list)))
    sink, failures = _run_sweep(ctx, source, solve, "table-D")
    rows = sink.rows()
    files = [write_csv(ctx.path(config.output.table_d), TABLE_D_COLUMNS, rows)]
    _emit(ctx, files[0], 'column("z_re")', 'column("D_re")', "Re z", "Re D_nu(z)", files)
    return RunOutcome(files=files, rows=len(rows), failures=failures)
