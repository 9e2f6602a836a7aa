"""Bayesian and Neyman-Pearson hypothesis testing games for d = 2.

Distributions on {0, 1} are identified by the probability of symbol 1, so the
attacker's set Q is an interval [q_lo, q_hi] discretized into a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .detect import ThresholdRule, type_i_curve, type_i_error, type_ii_error, type_ii_matrix
from .prob_core import Distribution

MAX_MATRIX_DIM = 10_000
FEASIBILITY_SLACK = 1e-12
MINIMIZER_GAP = 1e-12

COST_KINDS = ("scaled_absolute", "scaled_quadratic", "tabulated")


class GameSpecError(ValueError):
    pass


class InfeasibleRuleError(ValueError):
    """Decision rule violates the false-alarm constraint of the NP game."""


@dataclass(frozen=True)
class CostFunction:
    """Attacker's cost c(q) >= 0 on Q.

    ``scaled_absolute`` is ``scale * |q - qstar|``, ``scaled_quadratic`` is
    ``scale * (q - qstar)**2``; ``tabulated`` gives values on explicit points,
    which then also define the attacker's strategy grid.
    """

    kind: str
    scale: float = 1.0
    qstar: float | None = None
    points: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in COST_KINDS:
            raise GameSpecError(f"unknown cost kind {self.kind!r}; expected one of {COST_KINDS}")
        if self.kind == "tabulated":
            pts = tuple(float(v) for v in self.points)
            vals = tuple(float(v) for v in self.values)
            if not pts or len(pts) != len(vals):
                raise GameSpecError("tabulated cost needs equally many points and values")
            if any(b <= a for a, b in zip(pts, pts[1:])):
                raise GameSpecError("tabulated points must be strictly increasing")
            if any(v < 0 or not math.isfinite(v) for v in vals):
                raise GameSpecError("tabulated cost values must be finite and >= 0")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "qstar", pts[int(np.argmin(vals))])
        else:
            if self.qstar is None or not 0.0 < self.qstar < 1.0:
                raise GameSpecError(f"qstar must lie in (0, 1), got {self.qstar}")
            if not self.scale > 0 or not math.isfinite(self.scale):
                raise GameSpecError(f"cost scale must be positive, got {self.scale}")

    @classmethod
    def absolute(cls, qstar: float, scale: float = 1.0) -> CostFunction:
        return cls("scaled_absolute", scale=scale, qstar=qstar)

    @classmethod
    def quadratic(cls, qstar: float, scale: float = 1.0) -> CostFunction:
        return cls("scaled_quadratic", scale=scale, qstar=qstar)

    @classmethod
    def tabulated(cls, points, values) -> CostFunction:
        return cls("tabulated", points=tuple(points), values=tuple(values))

    def __call__(self, q1):
        q = np.asarray(q1, dtype=float)
        if self.kind == "scaled_absolute":
            out = self.scale * np.abs(q - self.qstar)
        elif self.kind == "scaled_quadratic":
            out = self.scale * (q - self.qstar) ** 2
        else:
            pts = np.asarray(self.points)
            idx = np.searchsorted(pts, q)
            idx = np.clip(idx, 0, len(pts) - 1)
            left = np.clip(idx - 1, 0, len(pts) - 1)
            nearest = np.where(np.abs(pts[left] - q) < np.abs(pts[idx] - q), left, idx)
            if np.any(np.abs(pts[nearest] - q) > 1e-12):
                raise GameSpecError("tabulated cost evaluated off its points")
            out = np.asarray(self.values)[nearest]
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        if self.kind == "tabulated":
            return f"tabulated({len(self.points)} points)"
        shape = "|q-{q}|" if self.kind == "scaled_absolute" else "(q-{q})^2"
        return f"{self.scale!r}*" + shape.format(q=repr(self.qstar))


@dataclass(frozen=True, kw_only=True)
class _GameSpec:
    p1: float
    q_lo: float
    q_hi: float
    n: int
    cost: CostFunction
    grid_size: int = 100
    include_qstar: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.p1 < 1.0:
            raise GameSpecError(f"p1 must lie in (0, 1) for full support, got {self.p1}")
        if not 0.0 < self.q_lo <= self.q_hi < 1.0:
            raise GameSpecError(f"need 0 < q_lo <= q_hi < 1, got [{self.q_lo}, {self.q_hi}]")
        if self.q_lo <= self.p1 <= self.q_hi:
            raise GameSpecError(f"p1 = {self.p1} lies in Q = [{self.q_lo}, {self.q_hi}]")
        if int(self.n) != self.n or self.n < 1:
            raise GameSpecError(f"n must be a positive integer, got {self.n}")
        if int(self.grid_size) != self.grid_size or self.grid_size < 1:
            raise GameSpecError(f"grid_size must be a positive integer, got {self.grid_size}")
        if self.cost.kind == "tabulated":
            pts = self.cost.points
            if pts[0] < self.q_lo - 1e-12 or pts[-1] > self.q_hi + 1e-12:
                raise GameSpecError("tabulated cost points fall outside Q")

    @property
    def p(self) -> Distribution:
        return Distribution.binary(self.p1)

    @cached_property
    def grid(self) -> np.ndarray:
        """Attacker strategies as probabilities of symbol 1, ascending."""
        if self.cost.kind == "tabulated":
            return np.array(self.cost.points)
        if self.q_lo == self.q_hi:
            pts = np.array([self.q_lo])
        else:
            pts = np.linspace(self.q_lo, self.q_hi, self.grid_size)
        qstar = self.cost.qstar
        if self.include_qstar and self.q_lo <= qstar <= self.q_hi:
            if not np.any(np.abs(pts - qstar) <= 1e-12):
                pts = np.sort(np.append(pts, qstar))
        return pts

    @property
    def grid_step(self) -> float:
        if self.q_lo == self.q_hi or self.grid_size < 2:
            return 0.0
        return (self.q_hi - self.q_lo) / (self.grid_size - 1)

    def q(self, q_index: int) -> Distribution:
        return Distribution.binary(float(self.grid[q_index]))

    def index_of(self, q1: float) -> int:
        """Grid index of the point nearest to q1."""
        return int(np.argmin(np.abs(self.grid - q1)))

    @cached_property
    def costs(self) -> np.ndarray:
        return np.asarray(self.cost(self.grid), dtype=float).reshape(-1)

    def _check_index(self, q_index: int) -> None:
        if not 0 <= q_index < len(self.grid):
            raise IndexError(f"q_index {q_index} outside grid of size {len(self.grid)}")


@dataclass(frozen=True, kw_only=True)
class BayesGameSpec(_GameSpec):
    gamma: float = 1.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.gamma > 0 or not math.isfinite(self.gamma):
            raise GameSpecError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True, kw_only=True)
class NPGameSpec(_GameSpec):
    epsilon: float

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 0.0 < self.epsilon < 1.0:
            raise GameSpecError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class PayoffMatrix:
    """Zero-sum-equivalent payoffs; rows are grid points, columns thresholds k = 0..n+1.

    The attacker (rows) maximizes and the defender (columns) minimizes.
    """

    entries: np.ndarray
    q_values: np.ndarray
    type_i: np.ndarray
    type_ii: np.ndarray
    costs: np.ndarray
    gamma: float
    n: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def thresholds(self) -> np.ndarray:
        return np.arange(self.n + 2)

    @property
    def errors(self) -> np.ndarray:
        """Classification error e_n(q_j, k) for every cell."""
        return self.type_ii + self.gamma * self.type_i[None, :]


def attacker_utility(spec: _GameSpec, q_index: int, rule: ThresholdRule) -> float:
    spec._check_index(q_index)
    return type_ii_error(rule, spec.q(q_index)) - float(spec.costs[q_index])


def defender_utility(spec: BayesGameSpec, q_index: int, rule: ThresholdRule) -> float:
    spec._check_index(q_index)
    return -(type_ii_error(rule, spec.q(q_index)) + spec.gamma * type_i_error(rule, spec.p))


def zero_sum_payoff(spec: BayesGameSpec, q_index: int, rule: ThresholdRule) -> float:
    """Payoff of the zero-sum game sharing all best responses with the Bayesian game."""
    spec._check_index(q_index)
    return (
        type_ii_error(rule, spec.q(q_index))
        + spec.gamma * type_i_error(rule, spec.p)
        - float(spec.costs[q_index])
    )


def build_payoff_matrix(spec: BayesGameSpec) -> PayoffMatrix:
    grid = spec.grid
    if spec.n + 2 > MAX_MATRIX_DIM or len(grid) > MAX_MATRIX_DIM:
        raise GameSpecError(
            f"payoff matrix {len(grid)} x {spec.n + 2} exceeds cap {MAX_MATRIX_DIM}"
        )
    t1 = type_i_curve(spec.n, spec.p)
    t2 = type_ii_matrix(spec.n, grid)
    costs = spec.costs
    entries = t2 + spec.gamma * t1[None, :] - costs[:, None]
    return PayoffMatrix(
        entries=entries,
        q_values=grid.copy(),
        type_i=t1,
        type_ii=t2,
        costs=costs.copy(),
        gamma=spec.gamma,
        n=spec.n,
    )


def np_attacker_utility(spec: NPGameSpec, q_index: int, rule: ThresholdRule) -> float:
    spec._check_index(q_index)
    fa = type_i_error(rule, spec.p)
    if fa > spec.epsilon + FEASIBILITY_SLACK:
        raise InfeasibleRuleError(
            f"false-alarm probability {fa!r} exceeds epsilon = {spec.epsilon}"
        )
    return type_ii_error(rule, spec.q(q_index)) - float(spec.costs[q_index])


def np_defender_utility(spec: NPGameSpec, q_index: int, rule: ThresholdRule) -> float:
    spec._check_index(q_index)
    return -type_ii_error(rule, spec.q(q_index))
