"""Experiment drivers: exponent sweeps, best-response scans, NP equilibria."""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..asymptotics import empirical_exponent, slope_exponent
from ..detect import ThresholdRule, log_type_ii_error, type_i_error
from ..equilibria import (
    SolverError,
    attacker_best_response,
    defender_best_response,
    defender_best_response_at,
    np_pure_equilibrium,
    solve_bayes_equilibrium,
)
from .config import ConfigError, RunConfig

SWEEP_COLUMNS = (
    "n",
    "eq_error",
    "exponent",
    "attacker_support_min",
    "attacker_support_max",
    "attacker_mode",
    "defender_k_min",
    "defender_k_max",
    "status",
    "wall_ms",
)
NP_EXTRA_COLUMNS = ("defender_pi", "false_alarm")
BR_COLUMNS = ("n", "curve", "q_index", "q", "k")


@dataclass
class SweepRow:
    n: int
    eq_error: float = math.nan
    exponent: float = math.nan
    attacker_support_min: float = math.nan
    attacker_support_max: float = math.nan
    attacker_mode: float = math.nan
    defender_k_min: int | None = None
    defender_k_max: int | None = None
    status: str = "ok"
    wall_ms: float = 0.0
    # mode threshold / n: the empirical decision boundary
    boundary_fraction: float = math.nan
    defender_pi: float | None = None
    false_alarm: float | None = None
    attacker_support: list[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _require(config: RunConfig, *kinds: str) -> RunConfig:
    if not config.resolved:
        config = config.resolve()
    if config.kind not in kinds:
        raise ConfigError(f"experiment kind {config.kind!r} not valid here; expected {kinds}")
    return config


def _pointwise(error: float, n: int) -> float:
    if error <= 0.0:
        return math.inf
    return empirical_exponent(error, n)


def _bayes_point(config: RunConfig, n: int) -> SweepRow:
    start = time.perf_counter()
    row = SweepRow(n=n)
    try:
        spec = config.bayes_spec(n)
        result = solve_bayes_equilibrium(spec, tol=config.tol)
    except SolverError as exc:
        row.status = f"solver_error: {exc}"
    else:
        support = result.attacker_support()
        ks = result.defender.support()
        row.eq_error = result.eq_error
        row.exponent = _pointwise(result.eq_error, n)
        row.attacker_support = [float(v) for v in support]
        row.attacker_support_min = float(support.min())
        row.attacker_support_max = float(support.max())
        row.attacker_mode = float(result.q_values[result.attacker.mode])
        row.defender_k_min = int(ks.min())
        row.defender_k_max = int(ks.max())
        row.boundary_fraction = result.defender.mode / n
    row.wall_ms = (time.perf_counter() - start) * 1e3
    return row


def _np_point(config: RunConfig, n: int) -> SweepRow:
    start = time.perf_counter()
    spec = config.np_spec(n)
    q_index, rule, error = np_pure_equilibrium(spec)
    q_hat = float(spec.grid[q_index])
    # log domain keeps the exponent finite once the error underflows
    log_error = log_type_ii_error(rule, spec.q(q_index))
    row = SweepRow(
        n=n,
        eq_error=error,
        exponent=-log_error / n,
        attacker_support_min=q_hat,
        attacker_support_max=q_hat,
        attacker_mode=q_hat,
        defender_k_min=rule.k,
        defender_k_max=rule.k,
        boundary_fraction=rule.k / n,
        defender_pi=rule.pi,
        false_alarm=type_i_error(rule, spec.p),
        attacker_support=[q_hat],
    )
    row.wall_ms = (time.perf_counter() - start) * 1e3
    return row


def _map_points(func, config: RunConfig, jobs: int | None) -> list[SweepRow]:
    jobs = config.jobs if jobs is None else jobs
    ns = list(config.n_values)
    if jobs <= 1 or len(ns) <= 1:
        return [func(config, n) for n in ns]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves input order, so rows come back ascending in n
        return list(pool.map(func, [config] * len(ns), ns))


def _apply_slope(rows: list[SweepRow], window: int) -> None:
    for i, row in enumerate(rows):
        chunk = [r for r in rows[max(0, i - window + 1) : i + 1] if r.ok and r.eq_error > 0]
        if len(chunk) < 2 or not row.ok:
            row.exponent = math.nan
        else:
            row.exponent = slope_exponent([r.eq_error for r in chunk], [r.n for r in chunk])


def run_exponent_sweep(config: RunConfig, jobs: int | None = None) -> list[SweepRow]:
    config = _require(config, "exponent_sweep_bayes")
    rows = _map_points(_bayes_point, config, jobs)
    if config.exponent_mode == "slope":
        _apply_slope(rows, config.slope_window)
    return rows


def run_np_experiment(config: RunConfig, jobs: int | None = None) -> list[SweepRow]:
    config = _require(config, "exponent_sweep_np", "np_equilibrium")
    if config.kind == "np_equilibrium":
        config = dataclasses.replace(config, n_values=(config.n,))
    rows = _map_points(_np_point, config, jobs)
    if config.exponent_mode == "slope":
        _apply_slope(rows, config.slope_window)
    return rows


@dataclass
class BestResponseTable:
    n: int
    q_values: np.ndarray
    defender_br: np.ndarray
    qstar: float
    k_star: int
    thresholds: np.ndarray
    attacker_br: np.ndarray
    intersections: list[tuple[float, int]]

    @property
    def intersects(self) -> bool:
        return bool(self.intersections)

    def attacker_br_q(self, k: int) -> float:
        pos = int(np.flatnonzero(self.thresholds == k)[0])
        return float(self.q_values[self.attacker_br[pos]])

    def rows(self) -> list[dict]:
        out = []
        for j, (q, k) in enumerate(zip(self.q_values, self.defender_br)):
            out.append({"n": self.n, "curve": "defender", "q_index": j, "q": float(q), "k": int(k)})
        for k, j in zip(self.thresholds, self.attacker_br):
            out.append(
                {"n": self.n, "curve": "attacker", "q_index": int(j), "q": float(self.q_values[j]), "k": int(k)}
            )
        for q, k in self.intersections:
            j = int(np.argmin(np.abs(self.q_values - q)))
            out.append({"n": self.n, "curve": "intersection", "q_index": j, "q": q, "k": k})
        return out


def best_response_table(config: RunConfig, n: int) -> BestResponseTable:
    spec = config.bayes_spec(n)
    grid = spec.grid
    defender = np.array([defender_best_response(spec, j) for j in range(len(grid))])
    qstar = float(spec.cost.qstar)
    k_star = defender_best_response_at(spec, qstar)
    half = config.window // 2
    lo = max(0, k_star - half)
    hi = min(n + 1, lo + config.window - 1)
    thresholds = np.arange(lo, hi + 1)
    attacker = np.array([attacker_best_response(spec, ThresholdRule(n, int(k))) for k in thresholds])
    intersections = [
        (float(grid[j]), int(k)) for k, j in zip(thresholds, attacker) if defender[j] == k
    ]
    return BestResponseTable(
        n=n,
        q_values=grid,
        defender_br=defender,
        qstar=qstar,
        k_star=k_star,
        thresholds=thresholds,
        attacker_br=attacker,
        intersections=intersections,
    )


def run_best_response_scan(config: RunConfig) -> list[BestResponseTable]:
    config = _require(config, "best_response_scan")
    return [best_response_table(config, n) for n in config.n_values]
