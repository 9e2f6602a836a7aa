import warnings

import numpy as np
import pytest

from hypgame.detect import ThresholdRule, type_i_error, type_ii_error
from hypgame.equilibria import (
    EquilibriumResult,
    MixedStrategy,
    attacker_best_response,
    defender_best_response,
    defender_best_response_at,
    np_dominant_rule,
    np_pure_equilibrium,
    solve_bayes_equilibrium,
    solve_zero_sum_lp,
    support_enumeration_ne,
    verify_equilibrium,
)
from hypgame.games import BayesGameSpec, CostFunction, NPGameSpec, build_payoff_matrix
from hypgame.prob_core import Distribution
from hypgame.simplex import solve_packing

P = Distribution.binary(0.5)


def bayes(**kw):
    base = dict(p1=0.5, q_lo=0.7, q_hi=0.9, n=20, cost=CostFunction.absolute(0.8))
    base.update(kw)
    return BayesGameSpec(**base)


class TestMixedStrategy:
    def test_validation(self):
        with pytest.raises(ValueError):
            MixedStrategy(np.array([0.5, -0.1, 0.6]))
        with pytest.raises(ValueError):
            MixedStrategy(np.array([0.5, 0.6]))

    def test_pure(self):
        s = MixedStrategy.pure(2, 4)
        assert s.mode == 2
        assert list(s.support()) == [2]


class TestPacking:
    def test_small(self):
        sol = solve_packing(np.array([[1.0, 2.0], [3.0, 1.0]]))
        # vertex y = (1/5, 2/5)
        np.testing.assert_allclose(sol.y, [0.2, 0.4], atol=1e-14)
        assert sol.objective == pytest.approx(0.6)
        np.testing.assert_allclose(sol.duals, [0.4, 0.2], atol=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            solve_packing(np.array([[1.0, 0.0]]))


class TestZeroSumLP:
    def test_matching_pennies(self):
        x, y, v = solve_zero_sum_lp(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        assert v == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(x.weights, [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(y.weights, [0.5, 0.5], atol=1e-12)

    def test_dominant_row(self):
        x, _, v = solve_zero_sum_lp(np.array([[2.0, 2.0], [1.0, 1.0]]))
        assert v == pytest.approx(2.0)
        np.testing.assert_allclose(x.weights, [1.0, 0.0], atol=1e-12)

    def test_interior(self):
        x, y, v = solve_zero_sum_lp(np.array([[3.0, 1.0], [0.0, 2.0]]))
        assert v == pytest.approx(1.5)
        np.testing.assert_allclose(x.weights, [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(y.weights, [0.25, 0.75], atol=1e-12)

    def test_one_by_one(self):
        x, y, v = solve_zero_sum_lp(np.array([[-4.2]]))
        assert v == pytest.approx(-4.2)
        assert x.weights[0] == 1.0 and y.weights[0] == 1.0

    def test_bad_input(self):
        with pytest.raises(ValueError):
            solve_zero_sum_lp(np.array([[np.nan]]))

    @pytest.mark.parametrize("seed", range(12))
    def test_against_support_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        m, k = rng.integers(1, 6, size=2)
        A = rng.normal(size=(m, k))
        x, y, v = solve_zero_sum_lp(A)
        _, _, v_oracle = support_enumeration_ne(A)
        assert v == pytest.approx(v_oracle, abs=1e-9)
        assert np.min(x.weights @ A) >= v - 1e-9
        assert np.max(A @ y.weights) <= v + 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_transpose_symmetry(self, seed):
        A = np.random.default_rng(50 + seed).uniform(-1, 1, size=(7, 9))
        assert solve_zero_sum_lp(-A.T)[2] == pytest.approx(-solve_zero_sum_lp(A)[2], abs=1e-10)

    def test_constant_shift(self):
        A = np.random.default_rng(3).uniform(size=(5, 6))
        assert solve_zero_sum_lp(A + 7.0)[2] == pytest.approx(solve_zero_sum_lp(A)[2] + 7.0, abs=1e-10)

    def test_deterministic(self):
        A = np.random.default_rng(9).uniform(size=(30, 40))
        a = solve_zero_sum_lp(A)
        b = solve_zero_sum_lp(A)
        assert np.array_equal(a[0].weights, b[0].weights)
        assert np.array_equal(a[1].weights, b[1].weights)
        assert a[2] == b[2]


class TestBayesEquilibrium:
    def test_single_point_grid(self):
        spec = bayes(n=2, q_lo=0.8, q_hi=0.8)
        res = solve_bayes_equilibrium(spec)
        assert isinstance(res, EquilibriumResult)
        # defender's best column of [1, 0.79, 0.61, 1] is k = 2
        assert res.defender.mode == 2
        assert res.value == pytest.approx(0.61)
        assert res.eq_error == pytest.approx(0.61)

    @pytest.mark.parametrize("n", [10, 40, 80])
    def test_certified(self, n):
        spec = bayes(n=n, grid_size=30)
        res = solve_bayes_equilibrium(spec)
        assert res.deviation_gain <= 1e-7
        assert verify_equilibrium(res, spec) <= 1e-7
        assert res.duality_gap <= 1e-9
        M = build_payoff_matrix(spec)
        x, y = res.attacker.weights, res.defender.weights
        assert res.eq_error == pytest.approx(x @ M.errors @ y, abs=1e-12)
        assert res.eq_error == pytest.approx(res.value + x @ M.costs, abs=1e-9)

    def test_perturbation_detected(self):
        spec = bayes(n=30, grid_size=20)
        res = solve_bayes_equilibrium(spec)
        y = np.zeros(len(res.defender))
        y[0] = 1.0  # always reject: the defender can do better
        bad = EquilibriumResult(
            res.attacker, MixedStrategy(y), res.value, res.eq_error, 0.0, res.q_values, 0.0
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            gain = verify_equilibrium(bad, spec, tol=1e-7)
        assert gain > 1e-3
        assert caught

    def test_value_lies_between_pure_bounds(self):
        M = build_payoff_matrix(bayes(n=25, grid_size=15))
        res = solve_bayes_equilibrium(bayes(n=25, grid_size=15))
        assert M.entries.min(axis=1).max() - 1e-12 <= res.value <= M.entries.max(axis=0).min() + 1e-12


class TestBestResponses:
    @pytest.mark.parametrize("n,k", [(200, 133), (250, 166), (700, 463), (800, 529)])
    def test_defender_at_qstar(self, n, k):
        assert defender_best_response_at(bayes(n=n), 0.8) == k

    def test_grid_index(self):
        spec = bayes(n=50, grid_size=11)
        assert defender_best_response(spec, 5) == defender_best_response_at(spec, spec.grid[5])
        with pytest.raises(IndexError):
            defender_best_response(spec, 11)

    def test_attacker_extremes(self):
        spec = bayes(n=20)
        # never rejecting makes every q worth 1; the cost picks q*
        assert spec.grid[attacker_best_response(spec, ThresholdRule(20, 21))] == pytest.approx(0.8, abs=0.002)
        # always rejecting: again pure cost minimization
        assert attacker_best_response(spec, ThresholdRule(20, 0)) == attacker_best_response(
            spec, ThresholdRule(20, 21)
        )

    def test_attacker_against_strict_rule(self):
        spec = bayes(n=200, include_qstar=True)
        assert spec.grid[attacker_best_response(spec, ThresholdRule(200, 133))] == 0.7


class TestNP:
    def test_small_examples(self):
        rule = np_dominant_rule(P, 0.1, 2)
        assert (rule.k, rule.pi) == (3, pytest.approx(0.4))
        rule = np_dominant_rule(P, 0.1, 1)
        assert (rule.k, rule.pi) == (2, pytest.approx(0.2))

    def test_boundary_tail(self):
        # P(m >= 2) = 1/4 exactly for n = 2
        rule = np_dominant_rule(P, 0.25, 2)
        assert (rule.k, rule.pi) == (2, 0.0)

    @pytest.mark.parametrize("n", [1, 4, 9, 30, 200])
    def test_exact_level(self, n):
        for eps in (0.01, 0.1, 0.3):
            assert type_i_error(np_dominant_rule(P, eps, n), P) == pytest.approx(eps, abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_dominance(self, n):
        rule = np_dominant_rule(P, 0.1, n)
        qs = [Distribution.binary(q) for q in (0.55, 0.7, 0.8, 0.95)]
        for k in range(n + 2):
            for pi in np.linspace(0, 1, 11):
                alt = ThresholdRule(n, k, float(pi))
                if type_i_error(alt, P) <= 0.1 + 1e-15:
                    for q in qs:
                        assert type_ii_error(rule, q) <= type_ii_error(alt, q) + 1e-12

    def test_invalid(self):
        with pytest.raises(ValueError):
            np_dominant_rule(P, 0.0, 5)
        with pytest.raises(ValueError):
            np_dominant_rule((1.0, 0.0), 0.1, 5)

    def test_pure_equilibrium(self):
        spec = NPGameSpec(p1=0.5, q_lo=0.7, q_hi=0.9, n=100, cost=CostFunction.absolute(0.8), epsilon=0.1)
        eq = np_pure_equilibrium(spec)
        assert eq.rule == np_dominant_rule(P, 0.1, 100)
        assert eq.eq_error == pytest.approx(type_ii_error(eq.rule, spec.q(eq.q_index)))
        assert verify_equilibrium(eq, spec) <= 1e-12

    def test_verify_type_check(self):
        spec = bayes(n=5)
        nspec = NPGameSpec(p1=0.5, q_lo=0.7, q_hi=0.9, n=5, cost=CostFunction.absolute(0.8), epsilon=0.1)
        with pytest.raises(TypeError):
            verify_equilibrium(np_pure_equilibrium(nspec), spec)
