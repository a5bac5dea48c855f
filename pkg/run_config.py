"""
Run configuration: one JSON document per run parsed into frozen dataclasses

Quantities may be given in natural units. With units.energy = "delta0",
mu0, window and reference_energy are multiples of delta0; with
units.length = "lead", x1, x2, bank_edge, grid.X and hardwall_widths are
multiples of the lead half length L. Every validation failure raises
ConfigError naming the dotted field path.

License: MIT
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from junction_model import JunctionProfile, RampShape, build_profile
from solver_errors import ConfigError, ProfileError

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 500
THETA_RANGE = (0.05, 0.3)


@dataclass(frozen=True)
class SolverToggles:
    bohr_sommerfeld: bool = True
    hard_wall: bool = False
    direct: bool = False
    resonances: bool = False
    shooting: bool = False


@dataclass(frozen=True)
class GridConfig:
    X: float = 3.0
    N: int = 4000
    richardson: bool = False


@dataclass(frozen=True)
class AcceptanceConfig:
    """Thresholds for the compare report, as fractions of delta0"""
    bs_direct_max: float = 0.01
    hardwall_bs_max: float = 0.02
    require_monotone: bool = True


@dataclass(frozen=True)
class TableDConfig:
    nu_list: Tuple[float, ...] = (-2.5, -0.5, 0.3, 1.7)
    z_min: float = -5.0
    z_max: float = 5.0
    points: int = 21
    z_imag: float = 0.0


@dataclass(frozen=True)
class OutputConfig:
    spectrum: str = "spectrum.csv"
    vectors: str = "vectors.csv"
    widths: str = "widths.csv"
    widths_summary: str = "widths_summary.csv"
    compare: str = "compare.csv"
    compare_text: str = "compare.txt"
    hardwall: str = "hardwall.csv"
    hardwall_limit: str = "hardwall_limit.csv"
    table_d: str = "table_D.csv"
    dump_vectors: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration in absolute units"""
    profile: JunctionProfile
    h_list: Tuple[float, ...]
    phi_list: Tuple[float, ...]
    window: Tuple[float, float]
    solvers: SolverToggles = field(default_factory=SolverToggles)
    grid: GridConfig = field(default_factory=GridConfig)
    theta_list: Tuple[float, ...] = (0.1,)
    tol_root: float = 1e-10
    tol_quad: float = 1e-10
    scan_points: int = 2000
    dphi: float = 1e-3
    reference_energy: Optional[float] = None
    hardwall_widths: Tuple[float, ...] = (0.2, 0.05, 0.02)
    acceptance: AcceptanceConfig = field(default_factory=AcceptanceConfig)
    table_d: TableDConfig = field(default_factory=TableDConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(name, "must be an object")
    return value


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(name, "must be finite")
    return float(value)


def _positive(value: Any, name: str) -> float:
    number = _number(value, name)
    if number <= 0:
        raise ConfigError(name, f"must be positive, got {number}")
    return number


def _integer(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(name, f"must be at least {minimum}, got {value}")
    return value


def _flag(value: Any, name: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(name, f"must be true or false, got {value!r}")
    return value


def _number_list(value: Any, name: str, positive: bool = False) -> Tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(name, "must be a non-empty list")
    check = _positive if positive else _number
    return tuple(check(item, f"{name}[{i}]") for i, item in enumerate(value))


def _units(data: Dict[str, Any]) -> Tuple[str, str]:
    units = _section(data, "units")
    energy = units.get("energy", "absolute")
    length = units.get("length", "absolute")
    if energy not in ("absolute", "delta0"):
        raise ConfigError("units.energy", f"must be 'absolute' or 'delta0', got {energy!r}")
    if length not in ("absolute", "lead"):
        raise ConfigError("units.length", f"must be 'absolute' or 'lead', got {length!r}")
    return energy, length


def _parse_profile(data: Dict[str, Any], energy_relative: bool, length_relative: bool) -> JunctionProfile:
    section = _section(data, "profile")
    values = {}
    for name in ("delta0", "mu0", "phi", "x1", "x2", "L"):
        if name not in section:
            raise ConfigError(f"profile.{name}", "is required")
        values[name] = _number(section[name], f"profile.{name}")
    bank_edge = section.get("bank_edge")
    if bank_edge is not None:
        bank_edge = _positive(bank_edge, "profile.bank_edge")

    ramp_shape = section.get("ramp_shape", RampShape.QUINTIC.value)
    try:
        ramp_shape = RampShape(ramp_shape)
    except ValueError:
        choices = ", ".join(shape.value for shape in RampShape)
        raise ConfigError("profile.ramp_shape", f"must be one of {choices}, got {ramp_shape!r}")

    lead = values["L"]
    scale = lead if length_relative else 1.0
    energy_unit = values["delta0"] if energy_relative else 1.0
    try:
        return build_profile(
            delta0=values["delta0"], mu0=values["mu0"] * energy_unit, phi=values["phi"],
            x1=values["x1"] * scale, x2=values["x2"] * scale, L=lead,
            ramp_shape=ramp_shape,
            bank_edge=None if bank_edge is None else bank_edge * scale,
        )
    except ProfileError as e:
        raise ConfigError("profile", str(e))


def _parse_solvers(data: Dict[str, Any]) -> SolverToggles:
    section = _section(data, "solvers")
    known = SolverToggles.__dataclass_fields__
    for name in section:
        if name not in known:
            raise ConfigError(f"solvers.{name}", "unknown solver")
    return SolverToggles(**{name: _flag(value, f"solvers.{name}") for name, value in section.items()})


def _parse_output(data: Dict[str, Any]) -> OutputConfig:
    section = _section(data, "output")
    known = OutputConfig.__dataclass_fields__
    values = {}
    for name, value in section.items():
        if name not in known:
            raise ConfigError(f"output.{name}", "unknown output")
        if name == "dump_vectors":
            values[name] = _flag(value, "output.dump_vectors")
        elif not isinstance(value, str) or not value:
            raise ConfigError(f"output.{name}", "must be a non-empty file name")
        else:
            values[name] = value
    return OutputConfig(**values)


def _parse_table_d(data: Dict[str, Any]) -> TableDConfig:
    section = _section(data, "table_d")
    defaults = TableDConfig()
    nu_list = (_number_list(section["nu_list"], "table_d.nu_list")
               if "nu_list" in section else defaults.nu_list)
    z_min = _number(section.get("z_min", defaults.z_min), "table_d.z_min")
    z_max = _number(section.get("z_max", defaults.z_max), "table_d.z_max")
    if not z_min < z_max:
        raise ConfigError("table_d.z_max", f"must exceed z_min={z_min}")
    return TableDConfig(
        nu_list=nu_list, z_min=z_min, z_max=z_max,
        points=_integer(section.get("points", defaults.points), "table_d.points", 2),
        z_imag=_number(section.get("z_imag", defaults.z_imag), "table_d.z_imag"),
    )


def parse_config(data: Dict[str, Any]) -> RunConfig:
    """
    Validate a configuration document.

    Args:
        data: Parsed JSON document

    Returns:
        RunConfig in absolute units

    Raises:
        ConfigError: Naming the first invalid field
    """
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    energy_units, length_units = _units(data)
    profile = _parse_profile(data, energy_units == "delta0", length_units == "lead")
    energy_unit = profile.delta0 if energy_units == "delta0" else 1.0
    length_unit = profile.lead_half_length if length_units == "lead" else 1.0

    if "h_list" not in data:
        raise ConfigError("h_list", "is required")
    h_list = _number_list(data["h_list"], "h_list", positive=True)
    phi_list = _number_list(data.get("phi_list", [profile.phi]), "phi_list")

    window_value = data.get("window", [0.0, 1.0 if energy_units == "delta0" else profile.delta0])
    if not isinstance(window_value, list) or len(window_value) != 2:
        raise ConfigError("window", "must be a list [low, high]")
    low = _number(window_value[0], "window[0]") * energy_unit
    high = _number(window_value[1], "window[1]") * energy_unit
    if not 0.0 <= low < high <= profile.delta0:
        raise ConfigError("window", f"must satisfy 0 <= low < high <= delta0, got [{low}, {high}]")

    grid_section = _section(data, "grid")
    grid = GridConfig(
        X=_positive(grid_section.get("X", 2.0 * profile.plateau_start / length_unit), "grid.X") * length_unit,
        N=_integer(grid_section.get("N", GridConfig.N), "grid.N", MIN_GRID_POINTS),
        richardson=_flag(grid_section.get("richardson", False), "grid.richardson"),
    )
    if not grid.X > profile.plateau_start:
        raise ConfigError("grid.X", f"must exceed the plateau start {profile.plateau_start}")

    theta_list = _number_list(data.get("theta_list", [0.1]), "theta_list")
    for i, theta in enumerate(theta_list):
        if not THETA_RANGE[0] <= theta <= THETA_RANGE[1]:
            raise ConfigError(f"theta_list[{i}]", f"must lie in {list(THETA_RANGE)}, got {theta}")

    tolerances = _section(data, "tolerances")
    reference = data.get("reference_energy")
    if reference is not None:
        reference = _number(reference, "reference_energy") * energy_unit
        if not 0.0 < reference < profile.delta0:
            raise ConfigError("reference_energy", f"must lie in (0, delta0), got {reference}")

    acceptance_section = _section(data, "acceptance")
    acceptance = AcceptanceConfig(
        bs_direct_max=_positive(acceptance_section.get("bs_direct_max", AcceptanceConfig.bs_direct_max),
                                "acceptance.bs_direct_max"),
        hardwall_bs_max=_positive(acceptance_section.get("hardwall_bs_max", AcceptanceConfig.hardwall_bs_max),
                                  "acceptance.hardwall_bs_max"),
        require_monotone=_flag(acceptance_section.get("require_monotone", True),
                               "acceptance.require_monotone"),
    )

    widths = _number_list(data.get("hardwall_widths", list(RunConfig.hardwall_widths)),
                          "hardwall_widths", positive=True)

    config = RunConfig(
        profile=profile, h_list=h_list, phi_list=phi_list, window=(low, high),
        solvers=_parse_solvers(data), grid=grid, theta_list=theta_list,
        tol_root=_positive(tolerances.get("root", RunConfig.tol_root), "tolerances.root"),
        tol_quad=_positive(tolerances.get("quad", RunConfig.tol_quad), "tolerances.quad"),
        scan_points=_integer(data.get("scan_points", RunConfig.scan_points), "scan_points", 10),
        dphi=_positive(data.get("dphi", RunConfig.dphi), "dphi"),
        reference_energy=reference,
        hardwall_widths=tuple(w * length_unit for w in widths),
        acceptance=acceptance, table_d=_parse_table_d(data), output=_parse_output(data),
    )
    logger.debug(f"Parsed config: {len(h_list)} h values, {len(phi_list)} phases, window {config.window}")
    return config


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON configuration file"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON in {path}: {e}")
    logger.info(f"Loaded configuration from {path}")
    return parse_config(data)
