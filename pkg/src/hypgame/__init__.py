"""Equilibria, finite-sample errors and error exponents of adversarial
hypothesis testing games (Bayesian and Neyman-Pearson)."""

__version__ = "0.1.0"

from .asymptotics import (
    AssumptionReport,
    balance_point,
    check_assumptions,
    chernoff_exponent,
    empirical_exponent,
    log_mgf_llr,
    stein_exponent,
)
from .detect import (
    ThresholdRule,
    TypeAcceptanceRule,
    bayes_error,
    enumeration_oracle_errors,
    type_i_error,
    type_ii_error,
    type_rule_errors,
)
from .equilibria import (
    EquilibriumResult,
    MixedStrategy,
    SolverError,
    attacker_best_response,
    defender_best_response,
    np_dominant_rule,
    np_pure_equilibrium,
    solve_bayes_equilibrium,
    solve_zero_sum_lp,
    support_enumeration_ne,
    verify_equilibrium,
)
from .games import BayesGameSpec, CostFunction, NPGameSpec, PayoffMatrix, build_payoff_matrix
from .prob_core import (
    Distribution,
    TypeVector,
    empirical_type,
    entropy,
    enumerate_types,
    kl_divergence,
    type_class_log_prob,
    type_prob_bounds,
)
