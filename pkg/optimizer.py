"""
Sum-throughput maximization over the time allocation (ρ, α, β).

The problem is split in two levels. For a fixed harvest fraction ρ the
remaining program in (α, β) is concave wherever every ST keeps E^H_n ≥ E_C:
the backscatter term is linear in α and each active term is the perspective
β_n f(u_n / β_n) of a concave f composed with an affine u_n(α). The outer
level scans ρ on a grid (the correctness backbone, ρ couples bilinearly with α)
and polishes the best grid point with a golden-section search.

Inside one ρ:

* β given α is solved exactly by water-filling: every ST that transmits at
  all runs at a common SNR level s*, except those pinned at a lower bound
  coming from the power limit or from its QoS demand.
* α is improved by projected-gradient ascent on the simplex using the
  envelope gradient of the β solution, from several lattice starting points.
  The max[0, E^H − E_C] clamp makes the α landscape non-concave across the
  E^H = E_C boundary; optima there sit on simplex vertices, which are always
  among the starts.
* When no lattice point meets every QoS demand, a feasibility phase maximizes
  the minimum QoS slack jointly over (α, β) with SLSQP before the ρ point is
  given up; its maximizer seeds the ascent.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import brentq, minimize, minimize_scalar

from model_core import TOLERANCE, Allocation, ChannelGains, ScenarioConfig, check_feasibility, sum_throughput
from scenario_error import ScenarioValidationError
from services import ConfigurationService

LN2 = math.log(2.0)
# The solver aims this far above R_t so re-evaluated points still pass check_feasibility.
QOS_MARGIN_REL = 1e-10
QOS_MARGIN_ABS = 1e-6
START_BUDGET = 64
ASCENT_STARTS = 3
FEASIBILITY_BUDGET = 2000
ARMIJO = 1e-4
MIN_STEP = 1e-12
MAX_BRUTE_FORCE_ST = 3
SLACK_MAX_ITER = 200
SLACK_FTOL = 1e-12


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class SolverOptions:
    rho_grid: int = 101
    rho_refine: bool = True
    rho_refine_tol: float = 1e-4
    inner_max_iter: int = 10_000
    inner_tol: float = 1e-8
    oracle_grid: int = 21

    def __post_init__(self):
        for name in ("rho_grid", "oracle_grid"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 2:
                raise ScenarioValidationError(name, "must be an integer >= 2")
        if isinstance(self.inner_max_iter, bool) or not isinstance(self.inner_max_iter, (int, np.integer)) \
                or self.inner_max_iter < 1:
            raise ScenarioValidationError("inner_max_iter", "must be a positive integer")
        for name in ("rho_refine_tol", "inner_tol"):
            if not getattr(self, name) > 0.0:
                raise ScenarioValidationError(name, "must be positive")


@dataclass(frozen=True)
class InnerResult:
    rho: float
    alpha: Optional[Tuple[float, ...]]
    beta: Optional[Tuple[float, ...]]
    value: float
    iterations: int
    feasible: bool
    hit_iteration_cap: bool = False
    min_qos_slack: Optional[float] = None


@dataclass
class SolveResult:
    allocation: Optional[Allocation]
    value: float
    outer_trace: List[Tuple[float, float]] = field(default_factory=list)
    status: SolveStatus = SolveStatus.OPTIMAL
    iterations: int = 0
    min_qos_slack: Optional[float] = None
    rho_refined: bool = False

    @property
    def feasible(self) -> bool:
        return self.status != SolveStatus.INFEASIBLE


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(v) + 1)
    cond = u - css / ind > 0
    k = ind[cond][-1]
    theta = css[cond][-1] / k
    return np.maximum(v - theta, 0.0)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def simplex_lattice(n: int, resolution: int) -> np.ndarray:
    """All points of the simplex with coordinates k / resolution, in lexicographic order."""
    return np.array(list(_compositions(resolution, n)), dtype=float) / resolution


def _lattice_resolution(n: int, budget: int) -> int:
    resolution = 1
    while resolution < 200 and math.comb(resolution + n, n - 1) <= budget:
        resolution += 1
    return resolution


def _start_points(n: int, budget: int) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    lattice = simplex_lattice(n, _lattice_resolution(n, budget))
    points = {tuple(p) for p in lattice}
    points.add(tuple(np.full(n, 1.0 / n)))
    return np.array(sorted(points))


@dataclass
class _Evaluation:
    value: float
    beta: np.ndarray
    a: np.ndarray
    stored: np.ndarray
    at_bound: np.ndarray
    qos_bound: np.ndarray


class _InnerProblem:
    """The fixed-ρ program in vectorized form."""

    def __init__(self, cfg: ScenarioConfig, gains: ChannelGains, rho: float):
        self.cfg = cfg
        self.rho = float(rho)
        self.n = cfg.n_st
        self.b = (1.0 - self.rho) * cfg.tau * np.asarray(cfg.r_b)
        self.c = (1.0 - cfg.tau) * cfg.eta * cfg.bandwidth_w
        self.harvest = cfg.p_t * np.asarray(gains.h) * cfg.mu * cfg.tau
        self.snr_gain = np.asarray(gains.g) / ((1.0 - cfg.tau) * cfg.noise_power)
        self.energy_per_air_time = (1.0 - cfg.tau) * cfg.p_bar
        self.target = cfg.r_t * (1.0 + QOS_MARGIN_REL) + QOS_MARGIN_ABS if cfg.r_t > 0.0 else 0.0

    def stored(self, alpha: np.ndarray) -> np.ndarray:
        fraction = self.rho + (1.0 - self.rho) * (alpha.sum() - alpha)
        return np.maximum(0.0, self.harvest * fraction - self.cfg.e_c)

    def active_bits(self, a: np.ndarray, beta: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            bits = self.c * beta * np.log1p(a / beta) / LN2
        return np.where(beta > 0.0, bits, 0.0)

    def _slope(self, a: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """∂/∂β of the active bits."""
        with np.errstate(divide="ignore", invalid="ignore"):
            s = a / beta
            slope = self.c / LN2 * (np.log1p(s) - s / (1.0 + s))
        return np.where((a > 0.0) & (beta > 0.0), slope, 0.0)

    def min_active_time(self, a_n: float, need: float) -> float:
        """Shortest β with β c log2(1 + a_n/β) >= need; inf when even β = 1 falls short."""
        if need <= 0.0:
            return 0.0
        if a_n <= 0.0:
            return math.inf

        def shortfall(t):
            return self.c * t * math.log1p(a_n / t) / LN2 - need

        if shortfall(1.0) < 0.0:
            return math.inf
        t = brentq(shortfall, 1e-30, 1.0, xtol=1e-15, rtol=4.0 * np.finfo(float).eps)
        while t < 1.0 and shortfall(t) < 0.0:
            t = min(1.0, t * (1.0 + 1e-12) + 1e-16)
        return t

    def water_fill(self, a: np.ndarray, lower: np.ndarray):
        """
        Maximize Σ β_n c log2(1 + a_n/β_n) over the simplex subject to β >= lower.

        Returns (beta, fixed) where ``fixed`` marks entries held at their bound,
        or None when the bounds do not fit in one period.
        """
        total_lower = lower.sum()
        if total_lower > 1.0 + TOLERANCE:
            return None
        free = a > 0.0
        if not free.any():
            # nobody can transmit; spread the idle air time evenly
            return lower + max(0.0, 1.0 - total_lower) / self.n, np.ones(self.n, dtype=bool)
        beta = lower.copy()
        while True:
            budget = 1.0 - lower[~free].sum()
            if budget <= 0.0:
                return beta, np.ones(self.n, dtype=bool)
            level = a[free].sum() / budget
            below = free & (a < lower * level)
            if not below.any():
                break
            free &= ~below
            if not free.any():
                return lower + max(0.0, 1.0 - total_lower) / self.n, np.ones(self.n, dtype=bool)
        beta[free] = a[free] / level
        return beta, ~free

    def allocate_active(self, alpha: np.ndarray) -> Optional[_Evaluation]:
        """Optimal β for this α, or None when no β meets the QoS and power constraints."""
        stored = self.stored(alpha)
        a = self.snr_gain * stored
        lower = stored / self.energy_per_air_time
        need = self.target - self.b * alpha
        if np.any((a <= 0.0) & (need > 0.0)):
            return None

        qos_bound = np.zeros(self.n, dtype=bool)
        checked = np.zeros(self.n, dtype=bool)
        for _ in range(self.n + 1):
            filled = self.water_fill(a, lower)
            if filled is None:
                return None
            beta, fixed = filled
            active = self.active_bits(a, beta)
            short = (active < need) & ~checked
            if not short.any():
                break
            for k in np.flatnonzero(short):
                m = self.min_active_time(a[k], need[k])
                if not math.isfinite(m):
                    return None
                if m > lower[k]:
                    lower[k] = m
                    qos_bound[k] = True
                checked[k] = True
        else:
            return None

        at_bound = fixed & (a > 0.0) & (lower > 0.0)
        value = float(np.sum(self.b * alpha) + np.sum(active))
        return _Evaluation(value=value, beta=beta, a=a, stored=stored, at_bound=at_bound, qos_bound=qos_bound)

    def qos_slack(self, alpha: np.ndarray) -> float:
        """Worst per-ST QoS slack when β only honours the power limit."""
        stored = self.stored(alpha)
        a = self.snr_gain * stored
        filled = self.water_fill(a, stored / self.energy_per_air_time)
        if filled is None:
            return -math.inf
        total = self.b * alpha + self.active_bits(a, filled[0])
        return float(np.min(total - self.cfg.r_t))

    def max_min_slack(self, alpha0: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        Maximize min_n (bits_n − R_t) over (α, β, t) with SLSQP, starting at α0.
        Returns the maximizing α and its slack in bits.
        """
        n = self.n
        scale = max(self.cfg.r_t, 1.0)
        stored0 = self.stored(alpha0)
        filled = self.water_fill(self.snr_gain * stored0, stored0 / self.energy_per_air_time)
        beta0 = filled[0] if filled is not None else np.full(n, 1.0 / n)

        def bits(x):
            alpha = np.clip(x[:n], 0.0, 1.0)
            beta = np.clip(x[n:2 * n], 0.0, 1.0)
            return self.b * alpha + self.active_bits(self.snr_gain * self.stored(alpha), beta)

        def slack(x):
            return (bits(x) - self.cfg.r_t) / scale

        objective_grad = np.zeros(2 * n + 1)
        objective_grad[-1] = -1.0
        constraints = [
            {"type": "ineq", "fun": lambda x: slack(x) - x[-1]},
            {"type": "eq", "fun": lambda x: np.array([x[:n].sum() - 1.0, x[n:2 * n].sum() - 1.0])},
        ]
        if math.isfinite(self.energy_per_air_time):
            constraints.append({"type": "ineq",
                                "fun": lambda x: x[n:2 * n] - self.stored(np.clip(x[:n], 0.0, 1.0))
                                / self.energy_per_air_time})

        x0 = np.concatenate([alpha0, beta0, [0.0]])
        x0[-1] = float(np.min(slack(x0)))
        result = minimize(lambda x: -x[-1], x0, jac=lambda x: objective_grad, method="SLSQP",
                          bounds=[(0.0, 1.0)] * (2 * n) + [(None, None)], constraints=constraints,
                          options={"maxiter": SLACK_MAX_ITER, "ftol": SLACK_FTOL})
        x = result.x if np.all(np.isfinite(result.x)) else x0
        x = np.concatenate([project_simplex(x[:n]), project_simplex(x[n:2 * n]), x[-1:]])
        best = float(np.min(bits(x) - self.cfg.r_t))
        logging.debug(f"[optimizer] rho={self.rho:.6g}: max-min QoS slack {best:.6g} bits ({result.message})")
        return x[:n], best

    def gradient(self, ev: _Evaluation) -> np.ndarray:
        """
        Envelope gradient of V(α) = max_β objective, up to a constant shift
        (irrelevant on the simplex).
        """
        d_stored = np.where(ev.stored > 0.0, -self.harvest * (1.0 - self.rho), 0.0)
        d_a = self.snr_gain * d_stored
        with np.errstate(divide="ignore", invalid="ignore"):
            d_bits_d_a = np.where(ev.a > 0.0, self.c * ev.beta / (LN2 * (ev.beta + ev.a)), 0.0)
        own = self.b + d_bits_d_a * d_a
        if not ev.at_bound.any():
            return own

        slope = self._slope(ev.a, ev.beta)
        free = (ev.a > 0.0) & ~ev.at_bound
        nu = slope[free].max() if free.any() else slope[ev.at_bound].max()
        omega = np.maximum(nu - slope, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            d_qos_bound = -own / slope
        d_power_bound = d_stored / self.energy_per_air_time
        d_lower = np.where(ev.qos_bound, d_qos_bound, d_power_bound)
        return own - np.where(ev.at_bound, omega * d_lower, 0.0)

    def ascend(self, alpha: np.ndarray, ev: _Evaluation, max_iter: int, tol: float):
        """
        Projected-gradient ascent with Armijo backtracking.
        Returns (alpha, evaluation, iterations, hit_cap).
        """
        step = 1.0
        for iteration in range(1, max_iter + 1):
            grad = self.gradient(ev)
            scale = float(np.max(np.abs(grad)))
            if not scale > 0.0 or not math.isfinite(scale):
                return alpha, ev, iteration, False
            direction = grad / scale
            accepted = None
            while step >= MIN_STEP:
                candidate = project_simplex(alpha + step * direction)
                moved = candidate - alpha
                if np.max(np.abs(moved)) <= 1e-15:
                    # the projection returns alpha itself: first-order stationary
                    return alpha, ev, iteration, False
                trial = self.allocate_active(candidate)
                if trial is not None and trial.value >= ev.value + ARMIJO * scale * float(direction @ moved):
                    accepted = (candidate, trial)
                    break
                step *= 0.5
            if accepted is None:
                return alpha, ev, iteration, False
            gain = accepted[1].value - ev.value
            alpha, ev = accepted
            # stop once an iteration gains less than a hundredth of the tolerance
            if gain <= 0.01 * tol * max(1.0, abs(ev.value)):
                return alpha, ev, iteration, False
            step = min(1.0, 2.0 * step)
        return alpha, ev, max_iter, True


def _lexicographic_key(alpha, beta):
    return tuple(alpha) + tuple(beta)


def solve_beta(cfg: ScenarioConfig, gains: ChannelGains, rho: float, alpha) -> InnerResult:
    """Optimal active-time fractions for a fixed (ρ, α)."""
    problem = _InnerProblem(cfg, gains, rho)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (cfg.n_st,):
        raise ScenarioValidationError("alpha", f"expected {cfg.n_st} entries")
    ev = problem.allocate_active(alpha)
    if ev is None:
        return InnerResult(rho=float(rho), alpha=tuple(alpha), beta=None, value=-math.inf, iterations=0,
                           feasible=False, min_qos_slack=problem.qos_slack(alpha))
    return InnerResult(rho=float(rho), alpha=tuple(alpha), beta=tuple(np.clip(ev.beta, 0.0, 1.0)), value=ev.value,
                       iterations=0, feasible=True)


def solve_inner(cfg: ScenarioConfig, gains: ChannelGains, rho: float,
                opts: Optional[SolverOptions] = None) -> InnerResult:
    """Best (α, β) for a fixed ρ."""
    opts = opts or SolverOptions()
    if not 0.0 <= rho <= 1.0:
        raise ScenarioValidationError("rho", "must lie in [0, 1]")
    problem = _InnerProblem(cfg, gains, rho)

    starts = _start_points(cfg.n_st, START_BUDGET)
    feasible = [(alpha, ev) for alpha in starts if (ev := problem.allocate_active(alpha)) is not None]
    if not feasible:
        wider = _start_points(cfg.n_st, FEASIBILITY_BUDGET)
        feasible = [(alpha, ev) for alpha in wider if (ev := problem.allocate_active(alpha)) is not None]
        if not feasible:
            slacks = [problem.qos_slack(alpha) for alpha in wider]
            alpha, slack = problem.max_min_slack(wider[int(np.argmax(slacks))])
            ev = problem.allocate_active(alpha)
            if ev is None:
                slack = max(slack, max(slacks))
                logging.debug(f"[optimizer] rho={rho:.6g}: infeasible, best max-min QoS slack {slack:.6g}")
                return InnerResult(rho=float(rho), alpha=None, beta=None, value=-math.inf, iterations=0,
                                   feasible=False, min_qos_slack=slack)
            feasible = [(alpha, ev)]

    feasible.sort(key=lambda item: (-item[1].value, tuple(item[0])))
    best = None
    iterations = 0
    hit_cap = False
    for alpha, ev in feasible[:ASCENT_STARTS]:
        alpha, ev, used, capped = problem.ascend(alpha, ev, opts.inner_max_iter, opts.inner_tol)
        iterations += used
        if best is None:
            best, hit_cap = (alpha, ev), capped
            continue
        best_value = best[1].value
        if ev.value > best_value + 1e-12 * abs(best_value) or (
                ev.value >= best_value - 1e-12 * abs(best_value)
                and _lexicographic_key(alpha, ev.beta) < _lexicographic_key(best[0], best[1].beta)):
            best, hit_cap = (alpha, ev), capped

    alpha, ev = best
    logging.debug(f"[optimizer] rho={rho:.6g}: value {ev.value:.9g} after {iterations} iterations")
    return InnerResult(rho=float(rho), alpha=tuple(alpha), beta=tuple(np.clip(ev.beta, 0.0, 1.0)), value=ev.value,
                       iterations=iterations, feasible=True, hit_iteration_cap=hit_cap)


def _solve_inner_task(args):
    return solve_inner(*args)


def parallel_map(fn, items):
    """
    Ordered map over joblib worker processes. The worker count comes from the
    configuration service ("threads"); without one the map runs serially.
    """
    items = list(items)
    workers = ConfigurationService().get_config("threads") or 1
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    return Parallel(n_jobs=min(workers, len(items)))(delayed(fn)(item) for item in items)


def _refine_rho(cfg, gains, bracket: List[InnerResult], opts: SolverOptions) -> Tuple[InnerResult, int]:
    """Golden-section polish inside a strict bracket of grid points; returns the best point seen."""
    seen = {r.rho: r for r in bracket}

    def negative_value(rho):
        rho = float(rho)
        if rho not in seen:
            seen[rho] = solve_inner(cfg, gains, rho, opts)
        return -seen[rho].value

    try:
        minimize_scalar(negative_value, bracket=tuple(r.rho for r in bracket), method="golden",
                        options={"xtol": opts.rho_refine_tol})
    except ValueError as e:
        logging.debug(f"[optimizer] rho refinement skipped: {e}")
    feasible = [r for r in seen.values() if r.feasible]
    best = max(feasible, key=lambda r: (r.value, -r.rho))
    grid_ids = {id(r) for r in bracket}
    return best, sum(r.iterations for r in seen.values() if id(r) not in grid_ids)


def _infeasible(inner: List[InnerResult], trace, iterations: int, reason: str) -> SolveResult:
    slacks = [r.min_qos_slack for r in inner if r.min_qos_slack is not None]
    slack = max(slacks) if slacks else None
    logging.info(f"[optimizer] {reason} (best max-min QoS slack {slack if slack is None else f'{slack:.6g}'} bits)")
    return SolveResult(allocation=None, value=-math.inf, outer_trace=trace, status=SolveStatus.INFEASIBLE,
                       iterations=iterations, min_qos_slack=slack)


def solve(cfg: ScenarioConfig, gains: ChannelGains, opts: Optional[SolverOptions] = None) -> SolveResult:
    """Maximize the sum throughput over (ρ, α, β)."""
    opts = opts or SolverOptions()
    grid = np.linspace(0.0, 1.0, opts.rho_grid)
    inner = parallel_map(_solve_inner_task, [(cfg, gains, float(rho), opts) for rho in grid])
    trace = [(r.rho, r.value) for r in inner]
    iterations = sum(r.iterations for r in inner)

    best_k = None
    for k, r in enumerate(inner):
        if r.feasible and (best_k is None or r.value > inner[best_k].value):
            best_k = k
    if best_k is None:
        return _infeasible(inner, trace, iterations, f"No feasible rho on a {opts.rho_grid}-point grid")

    best = inner[best_k]
    refined = False
    if opts.rho_refine and 0 < best_k < len(inner) - 1:
        left, right = inner[best_k - 1], inner[best_k + 1]
        if left.value < best.value and right.value < best.value:
            polished, used = _refine_rho(cfg, gains, [left, best, right], opts)
            iterations += used
            if polished.value > best.value + opts.inner_tol * abs(best.value):
                logging.debug(f"[optimizer] rho refined {best.rho:.6g} -> {polished.rho:.9g}")
                best, refined = polished, True

    # the polished point first, then the remaining grid points best value first
    fallbacks = sorted((r for r in inner if r.feasible and r is not best), key=lambda r: (-r.value, r.rho))
    for candidate in [best] + fallbacks:
        allocation = Allocation(rho=candidate.rho, alpha=candidate.alpha, beta=candidate.beta)
        if check_feasibility(cfg, gains, allocation).feasible:
            break
        logging.warning(f"[optimizer] Allocation at rho={candidate.rho:.6g} fails the feasibility re-check, "
                        "trying the next grid point")
    else:
        return _infeasible(inner, trace, iterations, "No allocation passes the feasibility re-check")
    refined = refined and candidate is best
    best = candidate
    value = sum_throughput(cfg, gains, allocation)
    status = SolveStatus.MAX_ITERATIONS if best.hit_iteration_cap else SolveStatus.OPTIMAL
    logging.info(f"[optimizer] N={cfg.n_st}: sum throughput {value:.6f} bits at rho={best.rho:.6g} ({status.value})")
    return SolveResult(allocation=allocation, value=value, outer_trace=trace, status=status,
                       iterations=iterations, rho_refined=refined)


def _grid_values(cfg: ScenarioConfig, gains: ChannelGains, rho: float, lattice: np.ndarray):
    """Sum throughput of every (α, β) lattice pair at one ρ; -inf marks infeasible pairs."""
    h = np.asarray(gains.h)
    g = np.asarray(gains.g)
    r_b = np.asarray(cfg.r_b)
    fraction = rho + (1.0 - rho) * (lattice.sum(axis=1, keepdims=True) - lattice)
    stored = np.maximum(0.0, cfg.p_t * h * cfg.mu * cfg.tau * fraction - cfg.e_c)[:, None, :]
    backscatter = ((1.0 - rho) * lattice * cfg.tau * r_b)[:, None, :]
    air_time = (1.0 - cfg.tau) * lattice[None, :, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = stored * g / (air_time * cfg.noise_power)
        active = np.where(air_time > 0.0, air_time * cfg.eta * cfg.bandwidth_w * np.log1p(snr) / LN2, 0.0)
        power = np.where((air_time > 0.0) & (stored > 0.0), stored / air_time, 0.0)
    total = backscatter + active
    power_ok = np.all(power <= cfg.p_bar + TOLERANCE, axis=2)
    feasible = np.all(total >= cfg.r_t - TOLERANCE, axis=2) & power_ok
    values = np.where(feasible, total.sum(axis=2), -np.inf)
    slack = np.where(power_ok, (total - cfg.r_t).min(axis=2), -np.inf)
    return values, float(slack.max())


def brute_force(cfg: ScenarioConfig, gains: ChannelGains, oracle_grid: int = 21) -> SolveResult:
    """
    Exhaustive search over ρ × simplex(α) × simplex(β) on a lattice of
    spacing 1/(oracle_grid − 1). Ties go to the lexicographically smallest (ρ, α, β).
    """
    if cfg.n_st > MAX_BRUTE_FORCE_ST:
        raise ScenarioValidationError("n_st", f"brute force supports at most {MAX_BRUTE_FORCE_ST} STs")
    if oracle_grid < 2:
        raise ScenarioValidationError("oracle_grid", "must be at least 2")

    lattice = simplex_lattice(cfg.n_st, oracle_grid - 1)
    best_value, best_point, best_slack = -math.inf, None, -math.inf
    trace = []
    for rho in np.linspace(0.0, 1.0, oracle_grid):
        values, slack = _grid_values(cfg, gains, float(rho), lattice)
        best_slack = max(best_slack, slack)
        k = int(np.argmax(values))
        i, j = divmod(k, len(lattice))
        trace.append((float(rho), float(values[i, j])))
        if values[i, j] > best_value:
            best_value, best_point = values[i, j], (float(rho), lattice[i], lattice[j])
    iterations = oracle_grid * len(lattice) ** 2

    if best_point is None:
        return SolveResult(allocation=None, value=-math.inf, outer_trace=trace, status=SolveStatus.INFEASIBLE,
                           iterations=iterations, min_qos_slack=best_slack)
    rho, alpha, beta = best_point
    allocation = Allocation(rho=rho, alpha=alpha, beta=beta)
    return SolveResult(allocation=allocation, value=sum_throughput(cfg, gains, allocation), outer_trace=trace,
                       status=SolveStatus.OPTIMAL, iterations=iterations)
