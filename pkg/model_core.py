import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from scenario_error import DomainError, ScenarioValidationError

SPEED_OF_LIGHT = 299_792_458.0
# Absolute tolerance for simplex sums and constraint comparisons.
TOLERANCE = 1e-9

MODE_HYBRID = "hybrid"
MODE_BACKSCATTER = "backscatter"
MODE_HARVEST_THEN_TRANSMIT = "harvest_then_transmit"
MODE_IDLE = "idle"

PHASE_HARVEST = "harvest"
PHASE_BACKSCATTER = "backscatter"
PHASE_ACTIVE = "active"


def dbi_to_linear(dbi: float) -> float:
    return 10.0 ** (dbi / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1000.0)


def _as_float_tuple(values) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Physical and protocol parameters of one problem instance.

    The scheduling period is normalized to one second, so ``e_c`` is the
    energy (J) the circuit consumes per period and throughputs are bits per period.
    """
    n_st: int
    p_t: float
    tau: float
    bandwidth_w: float
    carrier_freq: float
    gain_pt_dbi: float
    gain_st_dbi: float
    gain_sap_dbi: float
    mu: float
    eta: float
    noise_power: float
    e_c: float
    r_t: float
    p_bar: float
    r_b: Tuple[float, ...]
    d_pt_st: Tuple[float, ...]
    d_st_sap: Tuple[float, ...]

    def __post_init__(self):
        for name in ("r_b", "d_pt_st", "d_st_sap"):
            object.__setattr__(self, name, _as_float_tuple(getattr(self, name)))
        self.validate()

    def validate(self):
        if isinstance(self.n_st, bool) or not isinstance(self.n_st, (int, np.integer)) or self.n_st < 1:
            raise ScenarioValidationError("n_st", "must be a positive integer")
        if not 0.0 < self.tau < 1.0:
            raise ScenarioValidationError("tau", "must lie in (0, 1)")
        for name in ("mu", "eta"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ScenarioValidationError(name, "must lie in [0, 1]")
        for name in ("p_t", "bandwidth_w", "carrier_freq", "noise_power", "e_c", "p_bar"):
            if not getattr(self, name) > 0.0:
                raise ScenarioValidationError(name, "must be positive")
        if not self.r_t >= 0.0:
            raise ScenarioValidationError("r_t", "must be non-negative")
        for name in ("r_b", "d_pt_st", "d_st_sap"):
            values = getattr(self, name)
            if len(values) != self.n_st:
                raise ScenarioValidationError(name, f"expected {self.n_st} entries, got {len(values)}")
            if any(not v > 0.0 or math.isinf(v) for v in values):
                raise ScenarioValidationError(name, "all entries must be positive and finite")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq


def default_scenario(**overrides) -> ScenarioConfig:
    """Two-ST instance: 1 W primary, 100 kHz at 900 MHz, 6 dBi antennas, both STs 11 m from the PT."""
    params = dict(
        n_st=2,
        p_t=1.0,
        tau=0.7,
        bandwidth_w=100e3,
        carrier_freq=900e6,
        gain_pt_dbi=6.0,
        gain_st_dbi=6.0,
        gain_sap_dbi=6.0,
        mu=0.15,
        eta=0.6,
        noise_power=1e-10,
        e_c=dbm_to_watts(-25.0),
        r_t=10e3,
        p_bar=1.0,
        r_b=(100e3, 100e3),
        d_pt_st=(11.0, 11.0),
        d_st_sap=(2.0, 2.5),
    )
    params.update(overrides)
    return ScenarioConfig(**params)


def with_placement(cfg: ScenarioConfig, d_pt_st: Sequence[float], d_st_sap: Sequence[float]) -> ScenarioConfig:
    """Copy of ``cfg`` with a new ST placement; backscatter rates follow the first ST's rate."""
    if len(d_pt_st) != len(d_st_sap):
        raise ScenarioValidationError("d_st_sap", "placement lists must have equal length")
    n = len(d_pt_st)
    return replace(cfg, n_st=n, d_pt_st=tuple(d_pt_st), d_st_sap=tuple(d_st_sap), r_b=(cfg.r_b[0],) * n)


@dataclass(frozen=True)
class Allocation:
    """
    Time fractions of one scheduling period.

    ``beta`` either sums to one or is all zero (no active transmission at all,
    the backscatter-only schedule).
    """
    rho: float
    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "alpha", _as_float_tuple(self.alpha))
        object.__setattr__(self, "beta", _as_float_tuple(self.beta))
        if not 0.0 <= self.rho <= 1.0:
            raise ScenarioValidationError("rho", "must lie in [0, 1]")
        if len(self.alpha) != len(self.beta) or not self.alpha:
            raise ScenarioValidationError("beta", "alpha and beta must be non-empty and of equal length")
        for name in ("alpha", "beta"):
            values = getattr(self, name)
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise ScenarioValidationError(name, "entries must lie in [0, 1]")
        if abs(math.fsum(self.alpha) - 1.0) > TOLERANCE:
            raise ScenarioValidationError("alpha", "must sum to 1")
        beta_sum = math.fsum(self.beta)
        if abs(beta_sum - 1.0) > TOLERANCE and abs(beta_sum) > TOLERANCE:
            raise ScenarioValidationError("beta", "must sum to 1 (or be all zero)")

    @property
    def n_st(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class ChannelGains:
    h: Tuple[float, ...]
    g: Tuple[float, ...]
    near_field: Tuple[bool, ...] = ()

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "ChannelGains":
        h = tuple(friis_gain(cfg.gain_pt_dbi, cfg.gain_st_dbi, cfg.carrier_freq, d) for d in cfg.d_pt_st)
        g = tuple(friis_gain(cfg.gain_st_dbi, cfg.gain_sap_dbi, cfg.carrier_freq, d) for d in cfg.d_st_sap)
        near_field = tuple(hn > 1.0 or gn > 1.0 for hn, gn in zip(h, g))
        if any(near_field):
            logging.warning(f"[model] Channel gain above 1 for ST(s) {[i for i, f in enumerate(near_field) if f]}: "
                            "distance is inside the Friis near field")
        return cls(h=h, g=g, near_field=near_field)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible_qos: Tuple[bool, ...]
    feasible_power: Tuple[bool, ...]
    feasible_energy: Tuple[bool, ...]

    @property
    def feasible(self) -> bool:
        return all(self.feasible_qos) and all(self.feasible_power)


@dataclass(frozen=True)
class ThroughputReport:
    per_st_backscatter: Tuple[float, ...]
    per_st_active: Tuple[float, ...]
    per_st_total: Tuple[float, ...]
    sum_throughput: float
    harvested_energy: Tuple[float, ...]
    tx_power: Tuple[float, ...]
    feasible_qos: Tuple[bool, ...]
    feasible_power: Tuple[bool, ...]
    feasible_energy: Tuple[bool, ...] = ()
    modes: Tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return all(self.feasible_qos) and all(self.feasible_power)


@dataclass(frozen=True)
class ScheduleSlot:
    phase: str
    st: Optional[int]
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


def friis_gain(gain_tx_dbi: float, gain_rx_dbi: float, freq_hz: float, d_m: float) -> float:
    """Free-space power gain G_T G_R λ² / (4πd)²."""
    if not d_m > 0:
        raise DomainError(f"Distance must be positive, got {d_m}")
    if not freq_hz > 0:
        raise DomainError(f"Frequency must be positive, got {freq_hz}")
    wavelength = SPEED_OF_LIGHT / freq_hz
    return dbi_to_linear(gain_tx_dbi) * dbi_to_linear(gain_rx_dbi) * wavelength ** 2 / (4.0 * math.pi * d_m) ** 2


def _check_index(cfg: ScenarioConfig, alloc: Allocation, n: int):
    if alloc.n_st != cfg.n_st:
        raise ScenarioValidationError("alpha", f"allocation has {alloc.n_st} entries, scenario has {cfg.n_st} STs")
    if not 0 <= n < cfg.n_st:
        raise DomainError(f"ST index {n} out of range for {cfg.n_st} STs")


def harvest_fraction(alloc: Allocation, n: int) -> float:
    """Share of the busy period during which ST_n harvests: ρ + (1−ρ) Σ_{m≠n} α_m."""
    others = math.fsum(a for m, a in enumerate(alloc.alpha) if m != n)
    return alloc.rho + (1.0 - alloc.rho) * others


def harvested_energy(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation, n: int) -> float:
    _check_index(cfg, alloc, n)
    return cfg.p_t * gains.h[n] * cfg.mu * cfg.tau * harvest_fraction(alloc, n)


def stored_energy(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation, n: int) -> float:
    """Energy left for active transmission once the circuit consumption is paid."""
    return max(0.0, harvested_energy(cfg, gains, alloc, n) - cfg.e_c)


def active_tx_power(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation, n: int) -> float:
    stored = stored_energy(cfg, gains, alloc, n)
    air_time = (1.0 - cfg.tau) * alloc.beta[n]
    if air_time == 0.0:
        # energy with no air time to spend it in
        return 0.0 if stored == 0.0 else math.inf
    return stored / air_time


def st_throughput(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation, n: int) -> Tuple[float, float]:
    """Bits delivered by ST_n in one period, as (backscatter, active)."""
    _check_index(cfg, alloc, n)
    backscatter = (1.0 - alloc.rho) * alloc.alpha[n] * cfg.tau * cfg.r_b[n]
    air_time = (1.0 - cfg.tau) * alloc.beta[n]
    if air_time == 0.0:
        return backscatter, 0.0
    snr = stored_energy(cfg, gains, alloc, n) * gains.g[n] / (air_time * cfg.noise_power)
    active = air_time * cfg.eta * cfg.bandwidth_w * math.log1p(snr) / math.log(2.0)
    return backscatter, active


def sum_throughput(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation) -> float:
    terms = []
    for n in range(cfg.n_st):
        terms.extend(st_throughput(cfg, gains, alloc, n))
    return math.fsum(terms)


def check_feasibility(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation) -> FeasibilityReport:
    """
    Per-ST QoS and power checks.

    The power limit only binds when the ST has stored energy and air time;
    an ST with stored energy but β_n = 0 simply does not transmit.
    """
    qos, power, energy = [], [], []
    for n in range(cfg.n_st):
        backscatter, active = st_throughput(cfg, gains, alloc, n)
        qos.append(backscatter + active >= cfg.r_t - TOLERANCE)
        stored = stored_energy(cfg, gains, alloc, n)
        if stored == 0.0 or alloc.beta[n] == 0.0:
            power.append(True)
        else:
            power.append(stored / ((1.0 - cfg.tau) * alloc.beta[n]) <= cfg.p_bar + TOLERANCE)
        energy.append(harvested_energy(cfg, gains, alloc, n) > cfg.e_c)
    return FeasibilityReport(tuple(qos), tuple(power), tuple(energy))


def _mode(backscatter: float, active: float) -> str:
    if backscatter > 0.0 and active > 0.0:
        return MODE_HYBRID
    if backscatter > 0.0:
        return MODE_BACKSCATTER
    if active > 0.0:
        return MODE_HARVEST_THEN_TRANSMIT
    return MODE_IDLE


def evaluate(cfg: ScenarioConfig, gains: ChannelGains, alloc: Allocation) -> ThroughputReport:
    """All per-ST quantities of an allocation in one report."""
    split = [st_throughput(cfg, gains, alloc, n) for n in range(cfg.n_st)]
    backscatter = tuple(s[0] for s in split)
    active = tuple(s[1] for s in split)
    feasibility = check_feasibility(cfg, gains, alloc)
    return ThroughputReport(
        per_st_backscatter=backscatter,
        per_st_active=active,
        per_st_total=tuple(b + a for b, a in split),
        sum_throughput=sum_throughput(cfg, gains, alloc),
        harvested_energy=tuple(harvested_energy(cfg, gains, alloc, n) for n in range(cfg.n_st)),
        tx_power=tuple(active_tx_power(cfg, gains, alloc, n) for n in range(cfg.n_st)),
        feasible_qos=feasibility.feasible_qos,
        feasible_power=feasibility.feasible_power,
        feasible_energy=feasibility.feasible_energy,
        modes=tuple(_mode(b, a) for b, a in split),
    )


def build_schedule(cfg: ScenarioConfig, alloc: Allocation) -> List[ScheduleSlot]:
    """
    Lay the allocation out as the TDMA frame of one normalized period:
    harvest subperiod, backscatter slots in ST order, then the active slots
    in the idle period. Zero-length slots are left out.
    """
    if alloc.n_st != cfg.n_st:
        raise ScenarioValidationError("alpha", f"allocation has {alloc.n_st} entries, scenario has {cfg.n_st} STs")
    slots = []
    t = 0.0

    def push(phase, st, length):
        nonlocal t
        if length > 0.0:
            slots.append(ScheduleSlot(phase=phase, st=st, start=t, end=t + length))
            t += length

    push(PHASE_HARVEST, None, alloc.rho * cfg.tau)
    for n, a in enumerate(alloc.alpha):
        push(PHASE_BACKSCATTER, n, (1.0 - alloc.rho) * a * cfg.tau)
    t = cfg.tau
    for n, b in enumerate(alloc.beta):
        push(PHASE_ACTIVE, n, (1.0 - cfg.tau) * b)
    return slots
