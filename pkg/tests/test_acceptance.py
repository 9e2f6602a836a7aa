"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line in ``RESULTS``; ``conftest.py`` prints
them at the end of the session. Running this file directly prints the same
lines without pytest.
"""

import functools
import itertools
import math
import sys

import numpy as np
import pytest

from hypgame.asymptotics import balance_point, chernoff_exponent, log_mgf_llr, stein_exponent
from hypgame.detect import ThresholdRule, enumeration_oracle_errors, type_i_error, type_ii_error
from hypgame.equilibria import (
    attacker_best_response,
    defender_best_response_at,
    np_dominant_rule,
    solve_zero_sum_lp,
    support_enumeration_ne,
)
from hypgame.expcli import RunConfig, run_exponent_sweep, run_np_experiment
from hypgame.games import BayesGameSpec, CostFunction
from hypgame.prob_core import (
    Distribution,
    enumerate_types,
    kl_divergence,
    type_class_log_prob,
    type_prob_bounds,
)

P = Distribution.binary(0.5)
JOBS = 4
RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


@functools.cache
def sweep(q_lo, cost, scale, qstar, n_values, gamma=1.0):
    cfg = RunConfig(
        q_lo=q_lo, q_hi=0.9, cost=cost, cost_scale=scale, qstar=qstar, n_values=n_values, gamma=gamma
    ).resolve()
    rows = run_exponent_sweep(cfg, jobs=JOBS)
    assert all(r.ok for r in rows), [r.status for r in rows if not r.ok]
    return {r.n: r for r in rows}


def test_criterion_1_chernoff_values():
    c8 = chernoff_exponent(P, Distribution.binary(0.8))
    c9 = chernoff_exponent(P, Distribution.binary(0.9))
    ok = 0.0523 <= c8 <= 0.0533 and 0.1118 <= c9 <= 0.1128
    record(1, ok, f"chernoff(0.8) = {c8:.6f} in [0.0523, 0.0533]; chernoff(0.9) = {c9:.6f} in [0.1118, 0.1128]")


def test_criterion_2_stein_value():
    s = stein_exponent(P, Distribution.binary(0.8))
    record(2, abs(s - 0.223144) <= 1e-5, f"stein = {s:.7f}, target 0.223144 +- 1e-5")


def test_criterion_3_best_responses():
    targets = {200: (133, 0), 250: (166, 0), 700: (463, 0), 800: (529, 1)}
    got = {}
    for n, (k, slack) in targets.items():
        spec = BayesGameSpec(p1=0.5, q_lo=0.7, q_hi=0.9, n=n, cost=CostFunction.absolute(0.8))
        got[n] = defender_best_response_at(spec, 0.8)
    ok = all(abs(got[n] - k) <= s for n, (k, s) in targets.items())
    spec = BayesGameSpec(p1=0.5, q_lo=0.7, q_hi=0.9, n=200, cost=CostFunction.absolute(0.8))
    q_br = float(spec.grid[attacker_best_response(spec, ThresholdRule(200, 133))])
    ok = ok and q_br == 0.7
    record(3, ok, f"BR(0.8) = {got} (want 133/166/463/529+-1); BR^-1(133) = {q_br} (want 0.7)")


def test_criterion_4_absolute_cost_sweep():
    rows = sweep(0.7, "scaled_absolute", 1.0, 0.8, tuple(range(10, 301, 10)))
    e50, e300 = rows[50].exponent, rows[300].exponent
    d50, d300 = abs(e50 - 0.0528), abs(e300 - 0.0528)
    ok = len(rows) == 30 and d300 <= 0.01 and d300 < d50
    record(4, ok, f"exponent(300) = {e300:.5f} (|diff| {d300:.5f} <= 0.01); exponent(50) = {e50:.5f} (|diff| {d50:.5f})")


def test_criterion_5_separation_violated():
    rows = sweep(0.6, "scaled_absolute", 3.0, 0.9, (100, 200, 300, 400))
    e = rows[400].exponent
    ch = chernoff_exponent(P, Distribution.binary(0.9))
    ok = abs(e - 0.032) <= 0.01 and ch - e >= 0.05
    record(5, ok, f"exponent(400) = {e:.5f} (target 0.032 +- 0.01); chernoff(p, q*) - exponent = {ch - e:.5f} >= 0.05")


def test_criterion_6_cost_variants():
    e_abs = sweep(0.6, "scaled_absolute", 2.0, 0.9, (100, 200, 300, 400))[400].exponent
    e_quad = sweep(0.6, "scaled_quadratic", 1.0, 0.9, (100, 200, 300, 400))[400].exponent
    ok = abs(e_abs - 0.023) <= 0.01 and abs(e_quad - 0.011) <= 0.01
    record(6, ok, f"2|q-0.9|: {e_abs:.5f} (0.023 +- 0.01); (q-0.9)^2: {e_quad:.5f} (0.011 +- 0.01)")


def test_criterion_7_np_suite():
    worst_fa = max(
        abs(type_i_error(np_dominant_rule(P, 0.1, n), P) - 0.1) for n in range(1, 1001)
    )
    cfg = RunConfig(
        kind="exponent_sweep_np", q_lo=0.7, q_hi=0.8, epsilon=0.1, n_values=tuple(range(10, 1001, 10))
    ).resolve()
    rows = run_np_experiment(cfg, jobs=JOBS)
    modes = [r.attacker_mode for r in rows]
    # n0: first n after which the attacker never leaves 0.8
    tail = list(itertools.takewhile(lambda m: m == 0.8, reversed(modes)))
    n0 = rows[len(rows) - len(tail)].n if tail else None
    e800 = next(r.exponent for r in rows if r.n == 800)
    clauses = {
        "false alarm": worst_fa <= 1e-12,
        "attacker -> 0.8": n0 is not None and len(tail) >= 10,
        "exponent(800)": abs(e800 - 0.2231) <= 0.02,
    }
    detail = (
        f"max |P_FA - 0.1| = {worst_fa:.1e}; attacker = 0.8 for all n >= {n0}; "
        f"exponent(800) = {e800:.5f} (0.2231 +- 0.02); "
        + ", ".join(f"{k}: {'ok' if v else 'fail'}" for k, v in clauses.items())
    )
    record(7, all(clauses.values()), detail)


def test_criterion_8_properties():
    rng = np.random.default_rng(2024)
    parts = {}

    # (a) LP vs support enumeration
    worst = 0.0
    for _ in range(100):
        m, k = rng.integers(1, 6, size=2)
        A = rng.uniform(-1, 1, size=(m, k))
        worst = max(worst, abs(solve_zero_sum_lp(A)[2] - support_enumeration_ne(A)[2]))
    parts["a"] = worst <= 1e-7

    # (b) threshold errors vs 2^n enumeration
    worst = 0.0
    q = Distribution.binary(0.8)
    for n in range(1, 13):
        for k in range(n + 2):
            for pi in (0.0, 0.37, 1.0):
                rule = ThresholdRule(n, k, pi)
                worst = max(
                    worst,
                    abs(type_i_error(rule, P) - enumeration_oracle_errors(rule, P)[0]),
                    abs(type_ii_error(rule, q) - enumeration_oracle_errors(rule, q)[1]),
                )
    parts["b"] = worst <= 1e-12

    # (c) type-class probabilities: normalization and sandwich
    ok_c = True
    for d in (2, 3):
        for n in range(1, 11):
            mu = Distribution.normalized(rng.uniform(0.05, 1.0, size=d))
            total = 0.0
            for tv in enumerate_types(n, d):
                lp = type_class_log_prob(tv, mu)
                lo, up = type_prob_bounds(tv, mu)
                ok_c &= lo - 1e-12 <= lp <= up + 1e-12
                total += math.exp(lp)
            ok_c &= abs(total - 1.0) <= 1e-10
    parts["c"] = ok_c

    # (d) Gibbs inequality
    ok_d = True
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        mu = Distribution.normalized(rng.uniform(size=d))
        nu = Distribution.normalized(rng.uniform(size=d))
        ok_d &= kl_divergence(mu, nu) >= 0.0 and kl_divergence(mu, mu) == 0.0
    parts["d"] = ok_d

    # (e) balance-point divergence equals the Legendre-transform value
    worst = 0.0
    for q1 in np.linspace(0.55, 0.95, 9):
        qd = Distribution.binary(float(q1))
        nu = balance_point(P, qd)
        lam = np.linspace(0, 1, 2001)
        grid_max = max(-log_mgf_llr(P, qd, float(l)) for l in lam)
        worst = max(worst, abs(kl_divergence(nu, P) - chernoff_exponent(P, qd)))
        worst = max(worst, max(0.0, grid_max - chernoff_exponent(P, qd)))
    parts["e"] = worst <= 1e-8

    # (f) gamma robustness at n = 300
    exps = [sweep(0.7, "scaled_absolute", 1.0, 0.8, (300,), gamma=g)[300].exponent for g in (0.5, 1.0, 2.0)]
    parts["f"] = max(exps) - min(exps) < 0.01

    detail = ", ".join(f"({k}) {'ok' if v else 'fail'}" for k, v in parts.items())
    detail += f"; gamma spread {max(exps) - min(exps):.5f}"
    record(8, all(parts.values()), detail)


if __name__ == "__main__":
    failed = 0
    for name, func in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                func()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
