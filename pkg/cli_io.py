import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Sequence, Tuple

from model_core import ScenarioConfig, dbm_to_watts
from optimizer import SolverOptions
from phy_backscatter import DEFAULT_SNR_DB, PhyLink
from scenario_error import ScenarioValidationError
from services import FileService

DEFAULT_SCENARIO_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "scenarios", "default.json")

SCENARIO_KEYS = tuple(f.name for f in fields(ScenarioConfig))
LIST_KEYS = ("r_b", "d_pt_st", "d_st_sap")
# Quantities that may be given in dBm instead of watts.
DBM_ALTERNATIVES = {"e_c": "e_c_dbm", "p_bar": "p_bar_dbm"}
TOP_LEVEL_KEYS = ("scenario", "solver", "experiments", "phy")


@dataclass(frozen=True)
class ExperimentOptions:
    surface_grid: int = 101
    figure5_n_max: int = 8
    bt_qos: bool = True
    tau_list: Tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

    def __post_init__(self):
        object.__setattr__(self, "tau_list", tuple(float(t) for t in self.tau_list))
        if self.surface_grid < 2:
            raise ScenarioValidationError("experiments.surface_grid", "must be at least 2")
        if not 1 <= self.figure5_n_max <= 8:
            raise ScenarioValidationError("experiments.figure5_n_max", "must lie in 1..8")
        if any(not 0.0 < t < 1.0 for t in self.tau_list):
            raise ScenarioValidationError("experiments.tau_list", "every tau must lie in (0, 1)")


@dataclass(frozen=True)
class PhyOptions:
    link: PhyLink = field(default_factory=PhyLink)
    snr_db: Tuple[float, ...] = DEFAULT_SNR_DB
    n_bits: int = 100_000


@dataclass(frozen=True)
class ScenarioFile:
    config: ScenarioConfig
    solver: SolverOptions = field(default_factory=SolverOptions)
    experiments: ExperimentOptions = field(default_factory=ExperimentOptions)
    phy: PhyOptions = field(default_factory=PhyOptions)


@dataclass(frozen=True)
class Table:
    header: Tuple[str, ...]
    rows: List[Tuple] = field(default_factory=list)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_keys(section: Dict[str, Any], allowed: Sequence[str], where: str):
    if not isinstance(section, dict):
        raise ScenarioValidationError(where, "must be an object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ScenarioValidationError(f"{where}.{unknown[0]}" if where else unknown[0], "unknown key")


def _number(section, key, where, integer=False):
    value = section[key]
    if integer:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioValidationError(f"{where}.{key}", "must be an integer")
        return value
    if not _is_number(value):
        raise ScenarioValidationError(f"{where}.{key}", "must be a number")
    return float(value)


def _number_list(section, key, where):
    value = section[key]
    if not isinstance(value, list) or not all(_is_number(v) for v in value):
        raise ScenarioValidationError(f"{where}.{key}", "must be a list of numbers")
    return tuple(float(v) for v in value)


def _parse_config(section: Dict[str, Any]) -> ScenarioConfig:
    _check_keys(section, SCENARIO_KEYS + tuple(DBM_ALTERNATIVES.values()), "scenario")
    params = {}
    for key in SCENARIO_KEYS:
        alternative = DBM_ALTERNATIVES.get(key)
        if alternative and alternative in section:
            if key in section:
                raise ScenarioValidationError(f"scenario.{key}", f"give either '{key}' or '{alternative}', not both")
            params[key] = dbm_to_watts(_number(section, alternative, "scenario"))
            continue
        if key not in section:
            raise ScenarioValidationError(key, "missing required key", message="Missing value")
        if key in LIST_KEYS:
            params[key] = _number_list(section, key, "scenario")
        elif key == "n_st":
            params[key] = _number(section, key, "scenario", integer=True)
        elif key == "p_bar" and section[key] == "inf":
            params[key] = math.inf
        else:
            params[key] = _number(section, key, "scenario")
    return ScenarioConfig(**params)


def _parse_dataclass(cls, section, where, integer_keys=(), bool_keys=(), list_keys=()):
    allowed = [f.name for f in fields(cls)]
    _check_keys(section, allowed, where)
    params = {}
    for key in section:
        if key in integer_keys:
            params[key] = _number(section, key, where, integer=True)
        elif key in bool_keys:
            if not isinstance(section[key], bool):
                raise ScenarioValidationError(f"{where}.{key}", "must be true or false")
            params[key] = section[key]
        elif key in list_keys:
            params[key] = _number_list(section, key, where)
        else:
            params[key] = _number(section, key, where)
    return cls(**params)


def _parse_phy(section) -> PhyOptions:
    link_keys = [f.name for f in fields(PhyLink) if f.name != "noise_sigma"]
    _check_keys(section, link_keys + ["snr_db", "n_bits"], "phy")
    link_section = {k: v for k, v in section.items() if k in link_keys}
    link = _parse_dataclass(PhyLink, link_section, "phy", integer_keys=("samples_per_bit", "avg_window"))
    options = {}
    if "snr_db" in section:
        options["snr_db"] = _number_list(section, "snr_db", "phy")
    if "n_bits" in section:
        options["n_bits"] = _number(section, "n_bits", "phy", integer=True)
    return PhyOptions(link=link, **options)


def parse_scenario(document: Dict[str, Any]) -> ScenarioFile:
    """Validates a decoded scenario document."""
    _check_keys(document, TOP_LEVEL_KEYS, "")
    if "scenario" not in document:
        raise ScenarioValidationError("scenario", "missing required key", message="Missing value")
    config = _parse_config(document["scenario"])
    solver = _parse_dataclass(SolverOptions, document.get("solver", {}), "solver",
                              integer_keys=("rho_grid", "inner_max_iter", "oracle_grid"), bool_keys=("rho_refine",))
    experiments = _parse_dataclass(ExperimentOptions, document.get("experiments", {}), "experiments",
                                   integer_keys=("surface_grid", "figure5_n_max"), bool_keys=("bt_qos",),
                                   list_keys=("tau_list",))
    phy = _parse_phy(document.get("phy", {}))
    return ScenarioFile(config=config, solver=solver, experiments=experiments, phy=phy)


def load_scenario_file(path: str = DEFAULT_SCENARIO_PATH) -> ScenarioFile:
    directory, name = os.path.split(os.path.abspath(path))
    scenario = parse_scenario(FileService(directory).load_json(name))
    logging.info(f"[io] Loaded scenario '{path}' with {scenario.config.n_st} ST(s)")
    return scenario


def load_scenario(path: str = DEFAULT_SCENARIO_PATH) -> Tuple[ScenarioConfig, SolverOptions]:
    scenario = load_scenario_file(path)
    return scenario.config, scenario.solver


def _json_number(value: float):
    return "inf" if value == math.inf else value


def dump_scenario(cfg: ScenarioConfig, opts: SolverOptions = None) -> Dict[str, Any]:
    """Document that load_scenario turns back into the same config and options."""
    scenario = {}
    for key, value in asdict(cfg).items():
        scenario[key] = list(value) if isinstance(value, tuple) else _json_number(value)
    return {"scenario": scenario, "solver": asdict(opts or SolverOptions())}


def save_scenario(cfg: ScenarioConfig, opts: SolverOptions, path: str) -> str:
    directory, name = os.path.split(os.path.abspath(path))
    return FileService(directory).save_json(name, dump_scenario(cfg, opts))


def emit_csv(table: Table, path: str) -> str:
    """Writes a table as CSV with 17 significant digits; infeasible cells read 'infeasible'."""
    directory, name = os.path.split(os.path.abspath(path))
    return FileService(directory).save_csv(name, table.header, table.rows)


def rows_table(header: Sequence[str], items) -> Table:
    """Table from objects exposing ``as_row()``."""
    return Table(header=tuple(header), rows=[item.as_row() for item in items])
