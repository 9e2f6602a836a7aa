"""Decision rules and exact finite-n Type I / Type II errors.

Binary threshold rules reject H0 ("attack present") when the count of 1s
reaches ``k``; a count of exactly ``k - 1`` rejects with probability ``pi``.
Binomial tails are accumulated in the log domain in a fixed index order so
results are bit-reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .prob_core import (
    DEFAULT_TYPE_CAP,
    Distribution,
    DistributionError,
    TypeVector,
    as_distribution,
    enumerate_types,
    type_class_log_prob,
)

ORACLE_MAX_N = 12


@dataclass(frozen=True)
class ThresholdRule:
    n: int
    k: int
    pi: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.k <= self.n + 1:
            raise ValueError(f"k must lie in [0, {self.n + 1}], got {self.k}")
        if not 0.0 <= self.pi <= 1.0:
            raise ValueError(f"pi must lie in [0, 1], got {self.pi}")

    def reject_prob(self, count: int) -> float:
        """Probability of declaring H1 after observing ``count`` ones."""
        if count >= self.k:
            return 1.0
        if count == self.k - 1:
            return self.pi
        return 0.0


@dataclass(frozen=True)
class TypeAcceptanceRule:
    """Accept H0 exactly on the listed types."""

    n: int
    d: int
    accept_set: frozenset[tuple[int, ...]]

    def __post_init__(self) -> None:
        accept = frozenset(tuple(int(c) for c in t) for t in self.accept_set)
        object.__setattr__(self, "accept_set", accept)
        for counts in accept:
            if len(counts) != self.d or sum(counts) != self.n or min(counts) < 0:
                raise ValueError(f"{counts} is not a type for n={self.n}, d={self.d}")

    @classmethod
    def from_threshold(cls, rule: ThresholdRule) -> TypeAcceptanceRule:
        if rule.pi != 0.0:
            raise ValueError("only deterministic threshold rules are type-acceptance rules")
        accept = frozenset((rule.n - m, m) for m in range(min(rule.k, rule.n + 1)))
        return cls(rule.n, 2, accept)

    def accepts(self, tv: TypeVector) -> bool:
        return tv.counts in self.accept_set


def _binary(dist) -> Distribution:
    dist = as_distribution(dist)
    if dist.d != 2:
        raise DistributionError(f"threshold rules need d = 2, got d = {dist.d}")
    return dist


def binomial_log_pmf(n: int, p1: float) -> np.ndarray:
    """ln C(n, m) p1^m (1-p1)^(n-m) for m = 0..n."""
    m = np.arange(n + 1, dtype=float)
    log_coef = gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
    return log_coef + xlogy(m, p1) + xlogy(n - m, 1.0 - p1)


def log_upper_tails(n: int, p1: float) -> np.ndarray:
    """ln P(count >= k) for k = 0..n+1 (the last entry is -inf)."""
    lp = binomial_log_pmf(n, p1)
    tails = np.logaddexp.accumulate(lp[::-1])[::-1]
    return np.append(tails, -np.inf)


def log_lower_tails(n: int, p1: float) -> np.ndarray:
    """ln P(count <= k-1) for k = 0..n+1 (the first entry is -inf)."""
    lp = binomial_log_pmf(n, p1)
    return np.insert(np.logaddexp.accumulate(lp), 0, -np.inf)


_LOG_HALF = math.log(0.5)


def _prob_from_logs(log_self, log_other):
    """exp(log_self), taken as 1 - exp(log_other) when it exceeds 1/2."""
    log_self = np.asarray(log_self, dtype=float)
    log_other = np.asarray(log_other, dtype=float)
    out = np.where(log_self < _LOG_HALF, np.exp(log_self), -np.expm1(np.minimum(log_other, 0.0)))
    return float(out) if out.ndim == 0 else out


def type_i_curve(n: int, p) -> np.ndarray:
    """False-alarm probability of every deterministic threshold k = 0..n+1."""
    p1 = _binary(p)[1]
    return _prob_from_logs(log_upper_tails(n, p1), log_lower_tails(n, p1))


def type_ii_curve(n: int, q) -> np.ndarray:
    """Miss probability of every deterministic threshold k = 0..n+1."""
    q1 = _binary(q)[1]
    return _prob_from_logs(log_lower_tails(n, q1), log_upper_tails(n, q1))


def type_ii_matrix(n: int, q1_values: np.ndarray) -> np.ndarray:
    """Miss probabilities, one row per attacker point q1, columns k = 0..n+1."""
    q1 = np.asarray(q1_values, dtype=float)[:, None]
    m = np.arange(n + 1, dtype=float)[None, :]
    log_coef = gammaln(n + 1) - gammaln(m + 1) - gammaln(n - m + 1)
    lp = log_coef + xlogy(m, q1) + xlogy(n - m, 1.0 - q1)
    edge = np.full((lp.shape[0], 1), -np.inf)
    lower = np.hstack([edge, np.logaddexp.accumulate(lp, axis=1)])
    upper = np.hstack([np.logaddexp.accumulate(lp[:, ::-1], axis=1)[:, ::-1], edge])
    return _prob_from_logs(lower, upper)


def _log_rule_probs(rule: ThresholdRule, p1: float) -> tuple[float, float]:
    """(ln P(reject H0), ln P(accept H0)) when the count is Binomial(n, p1)."""
    if rule.k == 0:
        return 0.0, -math.inf
    lp = binomial_log_pmf(rule.n, p1)
    upper = log_upper_tails(rule.n, p1)
    lower = log_lower_tails(rule.n, p1)
    boundary = lp[rule.k - 1]
    log_pi = math.log(rule.pi) if rule.pi > 0.0 else -math.inf
    log_rest = math.log1p(-rule.pi) if rule.pi < 1.0 else -math.inf
    log_reject = float(np.logaddexp(upper[rule.k], log_pi + boundary))
    log_accept = float(np.logaddexp(lower[rule.k - 1], log_rest + boundary))
    return log_reject, log_accept


def log_type_i_error(rule: ThresholdRule, p) -> float:
    """Natural log of the Type I error; finite where the error underflows."""
    return _log_rule_probs(rule, _binary(p)[1])[0]


def log_type_ii_error(rule: ThresholdRule, q) -> float:
    return _log_rule_probs(rule, _binary(q)[1])[1]


def type_i_error(rule: ThresholdRule, p) -> float:
    log_reject, log_accept = _log_rule_probs(rule, _binary(p)[1])
    return _prob_from_logs(log_reject, log_accept)


def type_ii_error(rule: ThresholdRule, q) -> float:
    log_reject, log_accept = _log_rule_probs(rule, _binary(q)[1])
    return _prob_from_logs(log_accept, log_reject)


def bayes_error(rule: ThresholdRule, q, p, gamma: float = 1.0) -> float:
    """Weighted classification error ``type_ii(q) + gamma * type_i(p)``; may exceed 1."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return type_ii_error(rule, q) + gamma * type_i_error(rule, p)


def type_rule_errors(
    rule: TypeAcceptanceRule, p, q, cap: int = DEFAULT_TYPE_CAP
) -> tuple[float, float]:
    p = as_distribution(p)
    q = as_distribution(q)
    if p.d != rule.d or q.d != rule.d:
        raise DistributionError("alphabet sizes of rule and distributions differ")
    reject_logs = []
    accept_logs = []
    for tv in enumerate_types(rule.n, rule.d, cap=cap):
        if rule.accepts(tv):
            accept_logs.append(type_class_log_prob(tv, q))
        else:
            reject_logs.append(type_class_log_prob(tv, p))
    type_i = math.exp(logsumexp(reject_logs)) if reject_logs else 0.0
    type_ii = math.exp(logsumexp(accept_logs)) if accept_logs else 0.0
    return type_i, type_ii


def enumeration_oracle_errors(rule: ThresholdRule, dist) -> tuple[float, float]:
    """Brute force over all 2^n words: (P(reject H0), P(accept H0)) under ``dist``.

    With ``dist = p`` the first entry is the Type I error; with ``dist = q``
    the second is the Type II error.
    """
    dist = _binary(dist)
    if rule.n > ORACLE_MAX_N:
        raise ValueError(f"oracle limited to n <= {ORACLE_MAX_N}, got {rule.n}")
    reject = 0.0
    accept = 0.0
    for word in itertools.product((0, 1), repeat=rule.n):
        prob = 1.0
        for x in word:
            prob *= dist.probs[x]
        r = rule.reject_prob(sum(word))
        reject += prob * r
        accept += prob * (1.0 - r)
    return reject, accept
