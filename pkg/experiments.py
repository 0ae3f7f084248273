import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from model_core import (TOLERANCE, Allocation, ChannelGains, ScenarioConfig, check_feasibility, st_throughput,
                        sum_throughput, with_placement)
from optimizer import SolverOptions, SolveResult, SolveStatus, solve, solve_beta
from scenario_error import ScenarioValidationError

COMPARISON_HEADER = ("n_st", "ht", "wpt", "bt", "ht_wpt", "ht_bt")
FIGURE5_METADATA_HEADER = ("n_st", "ht_rho", "ht_status", "bt_status", "bt_qos_enforced")
TAU_SWEEP_HEADER = ("tau", "ht", "wpt", "bt")

# Comparison line: SAP at the origin, PT 15 m away, STs every 1 m from 2 m on.
SAP_TO_PT_M = 15.0
FIRST_ST_M = 2.0
ST_SPACING_M = 1.0
FIGURE5_MAX_ST = 8


@dataclass(frozen=True)
class ComparisonRow:
    n_st: int
    ht: Optional[float]
    wpt: Optional[float]
    bt: Optional[float]
    ht_wpt: Optional[float]
    ht_bt: Optional[float]
    ht_rho: Optional[float] = None
    ht_status: str = SolveStatus.OPTIMAL.value
    bt_status: str = SolveStatus.OPTIMAL.value
    bt_qos_enforced: bool = True

    def as_row(self) -> Tuple:
        return self.n_st, self.ht, self.wpt, self.bt, self.ht_wpt, self.ht_bt

    def metadata_row(self) -> Tuple:
        return self.n_st, self.ht_rho, self.ht_status, self.bt_status, self.bt_qos_enforced


@dataclass(frozen=True)
class SurfaceRow:
    x: float
    y: float
    value: float
    feasible: bool

    def as_row(self) -> Tuple:
        return self.x, self.y, self.value, self.feasible


@dataclass(frozen=True)
class TauRow:
    tau: float
    ht: Optional[float]
    wpt: Optional[float]
    bt: Optional[float]

    def as_row(self) -> Tuple:
        return self.tau, self.ht, self.wpt, self.bt


def _value_or_none(result: SolveResult) -> Optional[float]:
    return result.value if result.feasible else None


def solve_wpt(cfg: ScenarioConfig, gains: ChannelGains) -> SolveResult:
    """Harvest-then-transmit baseline: the whole busy period harvests (ρ = 1), only β is optimized."""
    alpha = tuple(1.0 / cfg.n_st for _ in range(cfg.n_st))
    inner = solve_beta(cfg, gains, 1.0, alpha)
    if not inner.feasible:
        logging.debug(f"[experiments] WPT infeasible for N={cfg.n_st}")
        return SolveResult(allocation=None, value=-math.inf, outer_trace=[(1.0, -math.inf)],
                           status=SolveStatus.INFEASIBLE, min_qos_slack=inner.min_qos_slack)
    allocation = Allocation(rho=1.0, alpha=alpha, beta=inner.beta)
    return SolveResult(allocation=allocation, value=sum_throughput(cfg, gains, allocation),
                       outer_trace=[(1.0, inner.value)])


def solve_bt(cfg: ScenarioConfig, gains: ChannelGains, enforce_qos: bool = True) -> SolveResult:
    """
    Backscatter-only baseline (ρ = 0, β = 0). The LP over α gives every ST
    exactly its QoS share and the rest to the fastest ST (lowest index on ties).
    """
    rates = cfg.tau * np.asarray(cfg.r_b)
    floor = cfg.r_t / rates if enforce_qos else np.zeros(cfg.n_st)
    reserved = math.fsum(floor)
    if reserved > 1.0 + TOLERANCE:
        # max-min slack: equalize τ R^b_n α_n − R_t with Σα = 1
        slack = (1.0 - reserved) / math.fsum(1.0 / rates)
        logging.debug(f"[experiments] BT infeasible for N={cfg.n_st}: QoS shares need {reserved:.6g} of the period")
        return SolveResult(allocation=None, value=-math.inf, outer_trace=[(0.0, -math.inf)],
                           status=SolveStatus.INFEASIBLE, min_qos_slack=slack)
    fastest = int(np.argmax(rates))
    alpha = floor.copy()
    alpha[fastest] += max(0.0, 1.0 - reserved)
    allocation = Allocation(rho=0.0, alpha=alpha, beta=(0.0,) * cfg.n_st)
    # Σ α_n rate_n written as the top rate minus what each floor gives up; exact for uniform rates
    value = float(rates[fastest]) - math.fsum(floor * (rates[fastest] - rates))
    return SolveResult(allocation=allocation, value=value, outer_trace=[(0.0, value)])


def decompose_ht(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation) -> Tuple[float, float]:
    """(backscatter_sum, active_sum) of an allocation."""
    split = [st_throughput(cfg, gains, alloc, n) for n in range(cfg.n_st)]
    return math.fsum(s[0] for s in split), math.fsum(s[1] for s in split)


def _require_two_st(cfg: ScenarioConfig):
    if cfg.n_st != 2:
        raise ScenarioValidationError("n_st", "surface sweeps need exactly 2 STs")


def _surface_cell(cfg, gains, rho, alpha1, beta1) -> Tuple[float, bool]:
    allocation = Allocation(rho=rho, alpha=(alpha1, 1.0 - alpha1), beta=(beta1, 1.0 - beta1))
    return sum_throughput(cfg, gains, allocation), check_feasibility(cfg, gains, allocation).feasible


def run_figure4a(cfg: ScenarioConfig, grid: int = 101, alpha1: float = 0.5) -> List[SurfaceRow]:
    """Sum throughput over (ρ, β₁) at fixed α₁."""
    _require_two_st(cfg)
    gains = ChannelGains.from_config(cfg)
    axis = np.linspace(0.0, 1.0, grid)
    rows = []
    for rho in axis:
        for beta1 in axis:
            value, feasible = _surface_cell(cfg, gains, float(rho), alpha1, float(beta1))
            rows.append(SurfaceRow(float(rho), float(beta1), value, feasible))
    logging.info(f"[experiments] Figure 4a surface: {len(rows)} cells at alpha1={alpha1}")
    return rows


def run_figure4b(cfg: ScenarioConfig, grid: int = 101, rho: float = 0.5) -> List[SurfaceRow]:
    """Sum throughput over (α₁, β₁) at fixed ρ."""
    _require_two_st(cfg)
    gains = ChannelGains.from_config(cfg)
    axis = np.linspace(0.0, 1.0, grid)
    rows = []
    for alpha1 in axis:
        for beta1 in axis:
            value, feasible = _surface_cell(cfg, gains, rho, float(alpha1), float(beta1))
            rows.append(SurfaceRow(float(alpha1), float(beta1), value, feasible))
    logging.info(f"[experiments] Figure 4b surface: {len(rows)} cells at rho={rho}")
    return rows


def figure5_scenario(base_cfg: ScenarioConfig, n_st: int) -> ScenarioConfig:
    """ST_k sits 1+k m from the SAP and 14−k m from the PT, k = 1..n_st."""
    if not 1 <= n_st <= FIGURE5_MAX_ST:
        raise ScenarioValidationError("n_st", f"line geometry holds 1 to {FIGURE5_MAX_ST} STs")
    d_st_sap = [FIRST_ST_M + ST_SPACING_M * k for k in range(n_st)]
    d_pt_st = [SAP_TO_PT_M - d for d in d_st_sap]
    return with_placement(base_cfg, d_pt_st, d_st_sap)


def compare(cfg: ScenarioConfig, opts: Optional[SolverOptions] = None, enforce_bt_qos: bool = True) -> ComparisonRow:
    """HT, WPT and BT on one scenario."""
    gains = ChannelGains.from_config(cfg)
    ht = solve(cfg, gains, opts)
    wpt = solve_wpt(cfg, gains)
    bt = solve_bt(cfg, gains, enforce_qos=enforce_bt_qos)
    ht_bt, ht_wpt = decompose_ht(cfg, gains, ht.allocation) if ht.feasible else (None, None)
    if not bt.feasible and enforce_bt_qos:
        logging.warning(f"[experiments] BT cannot meet the per-ST QoS for N={cfg.n_st} "
                        f"(max-min slack {bt.min_qos_slack:.6g} bits); cell reported as infeasible")
    return ComparisonRow(
        n_st=cfg.n_st,
        ht=_value_or_none(ht),
        wpt=_value_or_none(wpt),
        bt=_value_or_none(bt),
        ht_wpt=ht_wpt,
        ht_bt=ht_bt,
        ht_rho=ht.allocation.rho if ht.feasible else None,
        ht_status=ht.status.value,
        bt_status=bt.status.value,
        bt_qos_enforced=enforce_bt_qos,
    )


def run_figure5(base_cfg: ScenarioConfig, n_range: Iterable[int] = range(1, FIGURE5_MAX_ST + 1),
                opts: Optional[SolverOptions] = None, enforce_bt_qos: bool = True) -> List[ComparisonRow]:
    """HT/WPT/BT comparison along the comparison line, one row per ST count."""
    rows = []
    for n in n_range:
        row = compare(figure5_scenario(base_cfg, n), opts, enforce_bt_qos)
        logging.info(f"[experiments] Figure 5 N={n}: HT={row.ht} WPT={row.wpt} BT={row.bt}")
        rows.append(row)
    return rows


def run_tau_sweep(base_cfg: ScenarioConfig, n_st: int, tau_list: Sequence[float],
                  opts: Optional[SolverOptions] = None, enforce_bt_qos: bool = True) -> List[TauRow]:
    """The three transmitters against the busy fraction τ on the comparison line."""
    rows = []
    for tau in tau_list:
        if not 0.0 < tau < 1.0:
            raise ScenarioValidationError("tau", "must lie in (0, 1)")
        cfg = figure5_scenario(base_cfg, n_st)
        row = compare(replace(cfg, tau=float(tau)), opts, enforce_bt_qos)
        logging.info(f"[experiments] tau={tau:.3g}: HT={row.ht} WPT={row.wpt} BT={row.bt}")
        rows.append(TauRow(float(tau), row.ht, row.wpt, row.bt))
    return rows
