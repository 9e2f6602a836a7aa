"""Error exponents, the Chernoff balance point, and checks of the game assumptions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .games import MINIMIZER_GAP, _GameSpec
from .prob_core import Distribution, DistributionError, as_distribution, kl_divergence

GOLDEN_MAX_ITER = 200
BISECTION_TOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _full_support_pair(p, q) -> tuple[Distribution, Distribution]:
    p = as_distribution(p)
    q = as_distribution(q)
    if p.d != q.d:
        raise DistributionError(f"dimension mismatch: {p.d} vs {q.d}")
    if not (p.full_support and q.full_support):
        raise DistributionError("distributions must have full support")
    return p, q


def log_mgf_llr(p, q, lam: float) -> float:
    """ln E_p[exp(lam * ln(q(X)/p(X)))] = ln sum_i p_i^(1-lam) q_i^lam."""
    p, q = _full_support_pair(p, q)
    logs = [(1.0 - lam) * math.log(a) + lam * math.log(b) for a, b in zip(p.probs, q.probs)]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))


def chernoff_exponent(p, q, tol: float = 1e-10) -> float:
    """Chernoff information: max over lam in [0, 1] of -ln sum_i p_i^(1-lam) q_i^lam.

    Golden-section search; the objective is concave in lam.
    """
    p, q = _full_support_pair(p, q)
    if p == q:
        raise ValueError("Chernoff exponent is degenerate for p == q")

    def f(lam: float) -> float:
        return -log_mgf_llr(p, q, lam)

    lo, hi = 0.0, 1.0
    a = hi - _INV_PHI * (hi - lo)
    b = lo + _INV_PHI * (hi - lo)
    fa, fb = f(a), f(b)
    for _ in range(GOLDEN_MAX_ITER):
        if hi - lo <= tol:
            break
        if fa < fb:
            lo, a, fa = a, b, fb
            b = lo + _INV_PHI * (hi - lo)
            fb = f(b)
        else:
            hi, b, fb = b, a, fa
            a = hi - _INV_PHI * (hi - lo)
            fa = f(a)
    return max(f(0.5 * (lo + hi)), fa, fb)


def balance_point(p, q) -> Distribution:
    """Point nu on the segment [p, q] with D(nu || p) = D(nu || q), for d = 2.

    D(nu||p) - D(nu||q) = sum_i nu_i ln(q_i / p_i) is affine in nu, so a
    bisection on the segment finds its unique zero.
    """
    p, q = _full_support_pair(p, q)
    if p.d != 2:
        raise DistributionError("balance_point is defined here for d = 2")
    if p[1] == q[1]:
        raise ValueError("balance point undefined for p == q")
    w0 = math.log(q[0] / p[0])
    w1 = math.log(q[1] / p[1])

    def g(nu1: float) -> float:
        return (1.0 - nu1) * w0 + nu1 * w1

    lo, hi = sorted((p[1], q[1]))
    g_lo = g(lo)
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            lo = hi = mid
            break
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return Distribution.binary(0.5 * (lo + hi))


def balance_point_closed_form(p, q) -> float:
    p, q = _full_support_pair(p, q)
    a = math.log(p[0] / q[0])
    b = math.log(q[1] / p[1])
    return a / (a + b)


def stein_exponent(p, q) -> float:
    p, q = _full_support_pair(p, q)
    return kl_divergence(p, q)


def empirical_exponent(error: float, n: int) -> float:
    """Pointwise exponent -ln(error) / n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not error > 0.0:
        raise ValueError(f"error must be positive, got {error}")
    return -math.log(error) / n


def slope_exponent(errors: Sequence[float], ns: Sequence[int]) -> float:
    """Negated least-squares slope of ln(error) against n."""
    ns_arr = np.asarray(ns, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if ns_arr.size < 2:
        raise ValueError("slope needs at least two points")
    if np.any(errs <= 0):
        raise ValueError("errors must be positive")
    slope = np.polyfit(ns_arr, np.log(errs), 1)[0]
    return float(-slope)


@dataclass
class AssumptionReport:
    a1_holds: bool
    a2_holds: bool
    a3_holds: bool
    a4_holds: bool
    qstar: float
    a4_balance_point: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.a1_holds and self.a2_holds and self.a3_holds and self.a4_holds


def check_assumptions(spec: _GameSpec) -> AssumptionReport:
    notes: list[str] = []
    grid = spec.grid
    p1 = spec.p1

    a1 = not (spec.q_lo <= p1 <= spec.q_hi)
    if not a1:
        notes.append(f"A1: p1 = {p1} lies in Q")

    a2 = 0.0 < p1 < 1.0 and bool(np.all((grid > 0.0) & (grid < 1.0)))
    if not a2:
        notes.append("A2: p or a grid point lacks full support")

    cost = spec.cost
    if cost.kind == "tabulated":
        vals = np.sort(np.asarray(cost.values))
        a3 = len(vals) == 1 or vals[1] - vals[0] > MINIMIZER_GAP
        qstar = float(cost.qstar)
        if not a3:
            notes.append("A3: tabulated cost has no unique minimizer on the grid")
    else:
        qstar = float(cost.qstar)
        a3 = spec.q_lo <= qstar <= spec.q_hi
        if not a3:
            notes.append(f"A3: cost minimizer {qstar} lies outside Q")
            qstar = min(max(qstar, spec.q_lo), spec.q_hi)
        # the grid itself may straddle q*; reported, not a violation of A3 on Q
        costs = np.sort(spec.costs)
        if len(costs) > 1 and costs[1] - costs[0] <= MINIMIZER_GAP:
            notes.append("A3: grid minimizer of the cost is not unique (q* between grid points)")

    a4 = False
    nu1 = None
    if qstar == p1:
        notes.append("A4: q* equals p")
    else:
        nu1 = balance_point(spec.p, Distribution.binary(qstar))[1]
        # {mu : D(mu||p) <= D(mu||q*)} is the closed half-line on p's side of nu1
        if qstar > p1:
            a4 = spec.q_lo > nu1
        else:
            a4 = spec.q_hi < nu1
        if not a4:
            notes.append(f"A4: balance point {nu1:.6f} is not separated from Q")
    return AssumptionReport(a1, a2, a3, a4, qstar, nu1, notes)


def simplex_lattice(d: int, resolution: int):
    """Points of the probability simplex with coordinates in multiples of 1/resolution."""
    for counts in itertools.product(range(resolution + 1), repeat=d - 1):
        rest = resolution - sum(counts)
        if rest >= 0:
            yield np.array(counts + (rest,), dtype=float) / resolution


def search_a4_violation(
    p, qstar, in_q: Callable[[np.ndarray], bool], resolution: int = 50
) -> tuple[bool, np.ndarray | None]:
    """Scan a simplex lattice for a point of Q with D(mu||p) <= D(mu||q*).

    Returns ``(found, witness)``. Not finding one only means no violation at
    this resolution; it does not certify the assumption.
    """
    p, qstar = _full_support_pair(p, qstar)
    w = np.log(qstar.array / p.array)
    for mu in simplex_lattice(p.d, resolution):
        # D(mu||p) - D(mu||q*) = sum_i mu_i ln(q*_i / p_i)
        if in_q(mu) and float(mu @ w) <= 0.0:
            return True, mu
    return False, None
