"""Finite-alphabet distributions, information measures and the method of types.

All logarithms are natural; divergences and entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.special import gammaln

NORMALIZATION_TOL = 1e-12
DEFAULT_TYPE_CAP = 10_000_000


class DistributionError(ValueError):
    """Invalid probability vector or incompatible dimensions."""


@dataclass(frozen=True)
class Distribution:
    """Probability vector over the alphabet {0, ..., d-1}."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        probs = tuple(float(v) for v in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise DistributionError(f"alphabet size must be >= 2, got {len(probs)}")
        if any(not math.isfinite(v) or v < 0.0 for v in probs):
            raise DistributionError(f"entries must be finite and nonnegative: {probs}")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DistributionError(f"entries sum to {total!r}, not 1")

    @classmethod
    def binary(cls, p1: float) -> Distribution:
        """Distribution on {0, 1} identified by the probability of symbol 1."""
        if not 0.0 <= p1 <= 1.0:
            raise DistributionError(f"p1 must lie in [0, 1], got {p1}")
        return cls((1.0 - p1, p1))

    @classmethod
    def normalized(cls, weights: Sequence[float]) -> Distribution:
        """Explicitly rescale nonnegative weights to sum to one."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise DistributionError("weights must be a finite nonnegative vector")
        total = math.fsum(w)
        if total <= 0.0:
            raise DistributionError("weights must have positive mass")
        return cls(tuple(w / total))

    @property
    def d(self) -> int:
        return len(self.probs)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.probs)

    @property
    def full_support(self) -> bool:
        return all(v > 0.0 for v in self.probs)

    def __getitem__(self, i: int) -> float:
        return self.probs[i]


@dataclass(frozen=True)
class TypeVector:
    """Symbol counts of an n-length word; counts / n is its empirical type."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise DistributionError("type vector needs at least 2 symbols")
        if any(c < 0 for c in counts):
            raise DistributionError(f"negative count in {counts}")
        if sum(counts) == 0:
            raise DistributionError("type vector of an empty word")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def as_distribution(self) -> Distribution:
        n = self.n
        return Distribution(tuple(c / n for c in self.counts))


def as_distribution(value: Distribution | Sequence[float]) -> Distribution:
    if isinstance(value, Distribution):
        return value
    return Distribution(tuple(value))


def _check_same_dim(mu: Distribution, nu: Distribution) -> None:
    if mu.d != nu.d:
        raise DistributionError(f"dimension mismatch: {mu.d} vs {nu.d}")


def kl_divergence(mu, nu) -> float:
    """Relative entropy D(mu || nu) in nats.

    Uses 0 ln(0/x) = 0 and returns ``math.inf`` when mu puts mass where nu
    does not.
    """
    mu = as_distribution(mu)
    nu = as_distribution(nu)
    _check_same_dim(mu, nu)
    total = 0.0
    for a, b in zip(mu.probs, nu.probs):
        if a == 0.0:
            continue
        if b == 0.0:
            return math.inf
        total += a * math.log(a / b)
    # rounding can leave a tiny negative residue when mu == nu
    return max(total, 0.0)


def entropy(mu) -> float:
    mu = as_distribution(mu)
    return -math.fsum(a * math.log(a) for a in mu.probs if a > 0.0)


def empirical_type(word: Sequence[int], d: int) -> TypeVector:
    if len(word) == 0:
        raise DistributionError("empty word")
    counts = [0] * d
    for x in word:
        if not 0 <= x < d:
            raise DistributionError(f"symbol {x} outside alphabet of size {d}")
        counts[x] += 1
    return TypeVector(tuple(counts))


def num_types(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def _compositions(n: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def enumerate_types(n: int, d: int, cap: int = DEFAULT_TYPE_CAP) -> list[TypeVector]:
    """All types of n-length words over d symbols, in lexicographic order."""
    if n < 1 or d < 2:
        raise DistributionError(f"need n >= 1 and d >= 2, got n={n}, d={d}")
    size = num_types(n, d)
    if size > cap:
        raise DistributionError(f"{size} types for n={n}, d={d} exceeds cap {cap}")
    return [TypeVector(c) for c in _compositions(n, d)]


def log_multinomial(counts: Sequence[int]) -> float:
    n = sum(counts)
    return float(gammaln(n + 1) - sum(gammaln(c + 1) for c in counts))


def type_class_log_prob(tv: TypeVector, q) -> float:
    """ln P_q(type class of tv) = ln[multinomial(n; counts) * prod q_i^counts_i]."""
    q = as_distribution(q)
    if tv.d != q.d:
        raise DistributionError(f"dimension mismatch: {tv.d} vs {q.d}")
    log_word = 0.0
    for c, qi in zip(tv.counts, q.probs):
        if c == 0:
            continue
        if qi == 0.0:
            return -math.inf
        log_word += c * math.log(qi)
    return log_multinomial(tv.counts) + log_word


def type_prob_bounds(tv: TypeVector, q) -> tuple[float, float]:
    """Method-of-types sandwich ``(-d ln(n+1) - n D, -n D)`` with D = D(type || q)."""
    q = as_distribution(q)
    n = tv.n
    div = kl_divergence(tv.as_distribution(), q)
    upper = -n * div
    lower = -tv.d * math.log(n + 1) - n * div
    return lower, upper
