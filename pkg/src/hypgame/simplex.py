"""Dense tableau simplex for packing LPs, with Bland's anti-cycling rule.

Solves ``max 1'y  s.t.  B y <= 1, y >= 0`` for a strictly positive matrix B,
which is the LP of the minimizing player of the matrix game B. The slack
basis is feasible, so no phase one is needed, and positivity of B keeps the
problem bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
MAX_PIVOTS = 1_000_000


class SimplexError(RuntimeError):
    """Pivot cap reached before optimality; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: "PackingSolution | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(eq=False)
class PackingSolution:
    y: np.ndarray
    # multipliers of the rows of B; optimal for  min 1'x s.t. B'x >= 1, x >= 0
    duals: np.ndarray
    objective: float
    pivots: int
    basis: np.ndarray


def _read_solution(B: np.ndarray, basis: np.ndarray, rhs: np.ndarray, pivots: int) -> PackingSolution:
    m, n = B.shape
    full = np.hstack([B, np.eye(m)])
    cost = np.concatenate([np.ones(n), np.zeros(m)])
    y = np.zeros(n)
    duals = np.zeros(m)
    basic = rhs.copy()
    try:
        # refactor the final basis from the original data to shed accumulated pivot error
        M = full[:, basis]
        basic_ref = np.linalg.solve(M, np.ones(m))
        duals_ref = np.linalg.solve(M.T, cost[basis])
        if np.all(basic_ref >= -PIVOT_TOL):
            basic = basic_ref
            duals = duals_ref
    except np.linalg.LinAlgError:
        pass
    basic = np.maximum(basic, 0.0)
    for row, var in enumerate(basis):
        if var < n:
            y[var] = basic[row]
    duals = np.maximum(duals, 0.0)
    return PackingSolution(y=y, duals=duals, objective=float(y.sum()), pivots=pivots, basis=basis.copy())


def solve_packing(
    B: np.ndarray, pivot_tol: float = PIVOT_TOL, max_pivots: int = MAX_PIVOTS
) -> PackingSolution:
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.size == 0:
        raise ValueError("B must be a nonempty matrix")
    if not np.all(np.isfinite(B)) or np.any(B <= 0):
        raise ValueError("B must be finite and strictly positive")
    m, n = B.shape
    # rows 0..m-1: [B | I | rhs]; last row: reduced costs | -objective
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = B
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = 1.0
    basis = np.arange(n, n + m)

    pivots = 0
    while True:
        reduced = T[m, :-1]
        candidates = np.flatnonzero(reduced > pivot_tol)
        if candidates.size == 0:
            break
        if pivots >= max_pivots:
            best = _read_solution(B, basis, T[:m, -1], pivots)
            raise SimplexError(f"no optimum after {pivots} pivots", best=best)
        col = candidates[0]
        column = T[:m, col]
        rows = np.flatnonzero(column > pivot_tol)
        # bounded by positivity of B, so some row always qualifies
        ratios = T[rows, -1] / column[rows]
        best_ratio = ratios.min()
        ties = rows[ratios <= best_ratio + pivot_tol * max(1.0, abs(best_ratio))]
        row = ties[np.argmin(basis[ties])]

        pivot_row = T[row] / T[row, col]
        T -= np.outer(T[:, col], pivot_row)
        T[row] = pivot_row
        T[:, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
        pivots += 1

    return _read_solution(B, basis, T[:m, -1], pivots)
