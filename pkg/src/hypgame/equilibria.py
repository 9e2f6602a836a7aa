"""Equilibria of the discretized hypothesis testing games.

The Bayesian game is solved through its zero-sum equivalent (payoff
``e_n(q, k) - c(q)``), which has the same best responses as the original
nonzero-sum game and hence the same equilibria. The Neyman-Pearson game in
the binary case has a strictly dominant defender rule and a pure equilibrium.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .detect import (
    ThresholdRule,
    binomial_log_pmf,
    log_upper_tails,
    type_i_error,
    type_ii_error,
    type_ii_matrix,
    type_i_curve,
)
from .games import (
    BayesGameSpec,
    NPGameSpec,
    PayoffMatrix,
    build_payoff_matrix,
)
from .prob_core import Distribution, as_distribution
from .simplex import MAX_PIVOTS, PIVOT_TOL, SimplexError, solve_packing

DUALITY_TOL = 1e-9
SUPPORT_TOL = 1e-12
ENUMERATION_MAX_DIM = 6


class SolverError(RuntimeError):
    """The LP could not certify an equilibrium; ``certificate`` is the best found."""

    def __init__(self, message: str, certificate: float | None = None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(eq=False)
class MixedStrategy:
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < -1e-9):
            raise ValueError("weights must be nonnegative")
        w = np.maximum(w, 0.0)
        total = w.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total!r}, not 1")
        self.weights = w / total

    @classmethod
    def pure(cls, index: int, size: int) -> MixedStrategy:
        w = np.zeros(size)
        w[index] = 1.0
        return cls(w)

    def support(self, threshold: float = SUPPORT_TOL) -> np.ndarray:
        return np.flatnonzero(self.weights > threshold)

    @property
    def mode(self) -> int:
        return int(np.argmax(self.weights))

    def __len__(self) -> int:
        return self.weights.size


@dataclass(eq=False)
class EquilibriumResult:
    attacker: MixedStrategy
    defender: MixedStrategy
    value: float
    eq_error: float
    deviation_gain: float
    q_values: np.ndarray
    duality_gap: float = 0.0

    @property
    def thresholds(self) -> np.ndarray:
        return np.arange(len(self.defender))

    def attacker_support(self) -> np.ndarray:
        """Grid points q1 played with positive probability."""
        return self.q_values[self.attacker.support()]


class NPEquilibrium(NamedTuple):
    q_index: int
    rule: ThresholdRule
    eq_error: float


def solve_zero_sum_lp(
    matrix, tol: float = DUALITY_TOL, max_pivots: int = MAX_PIVOTS
) -> tuple[MixedStrategy, MixedStrategy, float]:
    """Optimal strategies and value of a matrix game; rows maximize, columns minimize."""
    A = np.asarray(matrix.entries if isinstance(matrix, PayoffMatrix) else matrix, dtype=float)
    if A.ndim != 2 or A.size == 0 or not np.all(np.isfinite(A)):
        raise ValueError("payoff matrix must be a finite nonempty 2-D array")

    # column player: shift to entries >= 1, then max 1'y s.t. B y <= 1
    shift_col = 1.0 - A.min()
    # row player: same LP on the game -A' (roles swapped)
    shift_row = 1.0 + A.max()
    try:
        col_sol = solve_packing(A + shift_col, PIVOT_TOL, max_pivots)
        row_sol = solve_packing(shift_row - A.T, PIVOT_TOL, max_pivots)
    except SimplexError as exc:
        raise SolverError(str(exc), certificate=None) from exc

    y = col_sol.y / col_sol.objective
    x = row_sol.y / row_sol.objective
    upper = 1.0 / col_sol.objective - shift_col
    lower = shift_row - 1.0 / row_sol.objective

    maxmin = float(np.min(x @ A))
    minmax = float(np.max(A @ y))
    gap = minmax - maxmin
    if gap > tol:
        raise SolverError(f"duality gap {gap:.3e} exceeds tolerance {tol:.1e}", certificate=gap)
    value = 0.5 * (upper + lower)
    return MixedStrategy(x), MixedStrategy(y), value


def _indifference(M: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Solve M y = v 1, 1'y = 1; None if the system is singular."""
    s = M.shape[0]
    K = np.zeros((s + 1, s + 1))
    K[:s, :s] = M
    K[:s, s] = -1.0
    K[s, :s] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    if np.linalg.cond(K) > 1e12:
        return None
    sol = np.linalg.solve(K, rhs)
    return sol[:s], float(sol[s])


def support_enumeration_ne(
    matrix, max_dim: int = ENUMERATION_MAX_DIM
) -> tuple[MixedStrategy, MixedStrategy, float]:
    """Equilibrium of a small matrix game by enumerating square supports.

    Every matrix game has an extreme optimal pair supported on a square
    nonsingular submatrix, so this search always terminates with a solution.
    """
    A = np.asarray(matrix.entries if isinstance(matrix, PayoffMatrix) else matrix, dtype=float)
    m, k = A.shape
    if m > max_dim or k > max_dim:
        raise ValueError(f"{m} x {k} matrix exceeds enumeration cap {max_dim}")
    eps = 1e-10 * max(1.0, float(np.abs(A).max()))
    for size in range(1, min(m, k) + 1):
        for rows in itertools.combinations(range(m), size):
            for cols in itertools.combinations(range(k), size):
                sub = A[np.ix_(rows, cols)]
                col_part = _indifference(sub)
                row_part = _indifference(sub.T)
                if col_part is None or row_part is None:
                    continue
                y_s, v = col_part
                x_s, _ = row_part
                if np.any(y_s < -eps) or np.any(x_s < -eps):
                    continue
                x = np.zeros(m)
                y = np.zeros(k)
                x[list(rows)] = x_s
                y[list(cols)] = y_s
                if np.max(A @ y) <= v + eps and np.min(x @ A) >= v - eps:
                    return MixedStrategy(x), MixedStrategy(y), v
    raise RuntimeError("no equilibrium found by support enumeration")


def _deviation_gain(matrix: PayoffMatrix, x: np.ndarray, y: np.ndarray) -> float:
    # attacker: u_A(j, y) = sum_k y_k type_ii[j, k] - c_j
    u_att = matrix.type_ii @ y - matrix.costs
    att_gain = float(np.max(u_att) - x @ u_att)
    # defender: u_D(x, k) = -(sum_j x_j type_ii[j, k] + gamma type_i[k])
    u_def = -(x @ matrix.type_ii + matrix.gamma * matrix.type_i)
    def_gain = float(np.max(u_def) - u_def @ y)
    return max(att_gain, def_gain)


def solve_bayes_equilibrium(spec: BayesGameSpec, tol: float = DUALITY_TOL) -> EquilibriumResult:
    matrix = build_payoff_matrix(spec)
    x_mix, y_mix, value = solve_zero_sum_lp(matrix, tol=tol)
    x, y = x_mix.weights, y_mix.weights
    direct = float(x @ matrix.errors @ y)
    from_value = value + float(x @ matrix.costs)
    gap = float(np.max(matrix.entries @ y) - np.min(x @ matrix.entries))
    if abs(direct - from_value) > tol + 1e-12:
        raise SolverError(
            f"value + expected cost {from_value!r} disagrees with direct error {direct!r}",
            certificate=abs(direct - from_value),
        )
    gain = _deviation_gain(matrix, x, y)
    return EquilibriumResult(
        attacker=x_mix,
        defender=y_mix,
        value=value,
        eq_error=direct,
        deviation_gain=gain,
        q_values=matrix.q_values,
        duality_gap=gap,
    )


def defender_best_response_at(spec: BayesGameSpec, q1: float) -> int:
    """Best deterministic threshold against the attacker distribution (1 - q1, q1)."""
    errors = type_ii_matrix(spec.n, np.array([q1]))[0] + spec.gamma * type_i_curve(spec.n, spec.p)
    return int(np.argmin(errors))


def defender_best_response(spec: BayesGameSpec, q_index: int) -> int:
    spec._check_index(q_index)
    return defender_best_response_at(spec, float(spec.grid[q_index]))


def _grid_type_ii(spec, rule: ThresholdRule) -> np.ndarray:
    """Miss probability of ``rule`` at every grid point."""
    if rule.n != spec.n:
        raise ValueError(f"rule is for n = {rule.n}, game has n = {spec.n}")
    T = type_ii_matrix(spec.n, spec.grid)
    if rule.k == 0:
        return np.zeros(len(spec.grid))
    return (1.0 - rule.pi) * T[:, rule.k] + rule.pi * T[:, rule.k - 1]


def attacker_best_response(spec, rule: ThresholdRule) -> int:
    utilities = _grid_type_ii(spec, rule) - spec.costs
    return int(np.argmax(utilities))


def np_dominant_rule(p, epsilon: float, n: int) -> ThresholdRule:
    """Most powerful level-epsilon test: false-alarm probability exactly epsilon."""
    p = as_distribution(p)
    if p.d != 2 or not p.full_support:
        raise ValueError("need a full-support distribution on {0, 1}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    upper = np.exp(log_upper_tails(n, p[1]))
    # upper[0] = 1 > epsilon and upper[n + 1] = 0, so 1 <= k <= n + 1
    k = int(np.flatnonzero(upper <= epsilon)[0])
    boundary = math.exp(binomial_log_pmf(n, p[1])[k - 1])
    pi = (epsilon - upper[k]) / boundary
    return ThresholdRule(n, k, min(max(pi, 0.0), 1.0))


def np_pure_equilibrium(spec: NPGameSpec) -> NPEquilibrium:
    rule = np_dominant_rule(spec.p, spec.epsilon, spec.n)
    q_index = attacker_best_response(spec, rule)
    return NPEquilibrium(q_index, rule, type_ii_error(rule, spec.q(q_index)))


def _np_deviation_gain(result: NPEquilibrium, spec: NPGameSpec) -> float:
    rule = result.rule
    utilities = _grid_type_ii(spec, rule) - spec.costs
    att_gain = float(np.max(utilities) - utilities[result.q_index])
    # defender deviations: for each k, the feasible rule with the largest pi
    q = spec.q(result.q_index)
    current = type_ii_error(rule, q)
    upper = type_i_curve(spec.n, spec.p)
    pmf = np.exp(binomial_log_pmf(spec.n, spec.p1))
    def_gain = -math.inf
    for k in range(spec.n + 2):
        if upper[k] > spec.epsilon:
            continue
        pi = 0.0 if k == 0 else min(1.0, (spec.epsilon - upper[k]) / pmf[k - 1])
        alt = type_ii_error(ThresholdRule(spec.n, k, max(pi, 0.0)), q)
        def_gain = max(def_gain, current - alt)
    return max(att_gain, def_gain)


def verify_equilibrium(result, spec, tol: float | None = None) -> float:
    """Largest gain any player obtains by a pure deviation, in the original utilities."""
    if isinstance(result, NPEquilibrium):
        if not isinstance(spec, NPGameSpec):
            raise TypeError("NP equilibria are verified against an NPGameSpec")
        gain = _np_deviation_gain(result, spec)
    else:
        matrix = build_payoff_matrix(spec)
        gain = _deviation_gain(matrix, result.attacker.weights, result.defender.weights)
    if tol is not None and gain > tol:
        warnings.warn(f"deviation gain {gain:.3e} exceeds {tol:.1e}", RuntimeWarning, stacklevel=2)
    return gain
