"""Expected sort cost of the V1 sieve and comparison with measured counters.

When the front entry of the sorted list belongs to p(m)**2 (probability
1/p(m)**2 per position) it must pass, on average, the m-1 smaller squares
once each and every larger square q with probability p(m)**2 / q. That gives

    S(m) = (m-1)/p(m)**2 + sum_{i>m} 1/p(i)**2

moves per position, and summing over m,

    sum_m S(m) = 2 * sum_{i>=2} (i-1)/p(i)**2.

Terms decay like 1/(i ln^2 i) so the sum converges, but slowly; with
p(i) > i ln i the remainder after K terms is at most 2/ln K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine.search import RunStats
from .oracle import PrimeTable

DEFAULT_TERMS = 10**6


class InsufficientPrimes(ValueError):
    pass


@dataclass(frozen=True)
class SeriesPartialSum:
    terms_used: int
    value: float
    tail_estimate: float

    @property
    def upper(self) -> float:
        return self.value + self.tail_estimate

    def brackets(self, lo: float, hi: float) -> bool:
        """True when [value, value + tail] meets [lo, hi]."""
        return self.value <= hi and self.upper >= lo

    def __float__(self) -> float:
        return self.value


def table_for_terms(count: int) -> PrimeTable:
    """A prime table holding at least ``count`` primes."""
    n = max(count, 6)
    # p(n) < n (ln n + ln ln n) for n >= 6
    return PrimeTable.up_to(int(n * (math.log(n) + math.log(math.log(n)))) + 1)


def _first_primes(count: int, primes: PrimeTable | None) -> np.ndarray:
    if primes is None:
        primes = table_for_terms(count)
    if len(primes) < count:
        raise InsufficientPrimes(f"need {count} primes, table has {len(primes)}")
    return primes.primes[:count].astype(np.float64)


def s_of_m(m: int, K: int, primes: PrimeTable | None = None) -> SeriesPartialSum:
    """S(m) truncated after the K-th prime; the tail bound is 1/p(K)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if K < m + 1:
        raise ValueError("need K >= m + 1")
    p = _first_primes(K, primes)
    inv = 1.0 / (p * p)
    value = math.fsum([(m - 1) * inv[m - 1], math.fsum(inv[m:])])
    return SeriesPartialSum(K, value, 1.0 / p[K - 1])


def total_move_series(K: int, primes: PrimeTable | None = None) -> SeriesPartialSum:
    """``2 * sum_{i=2..K} (i-1)/p(i)**2`` with remainder bound 2/ln K."""
    if K < 2:
        raise ValueError("need K >= 2")
    p = _first_primes(K, primes)
    i = np.arange(1, K + 1, dtype=np.float64)
    value = 2.0 * math.fsum(((i - 1) / (p * p))[1:])
    return SeriesPartialSum(K, value, 2.0 / math.log(K))


def series_by_s_of_m(K: int, primes: PrimeTable | None = None) -> float:
    """``sum_{m=1..K} S(m)`` built term by term, for checking the closed form."""
    p = _first_primes(K, primes)
    inv = 1.0 / (p * p)
    # suffix[m] = sum_{i>m} 1/p(i)**2 (1-based m)
    suffix = np.concatenate((np.cumsum(inv[::-1])[::-1][1:], [0.0]))
    terms = [(m - 1) * inv[m - 1] + suffix[m - 1] for m in range(1, K + 1)]
    return math.fsum(terms)


def partial_sums(K: int, every: int = 1000, primes: PrimeTable | None = None) -> list[tuple[int, float]]:
    """``(k, value(k))`` at k = every, 2*every, ..., up to K (for plotting)."""
    p = _first_primes(K, primes)
    i = np.arange(1, K + 1, dtype=np.float64)
    terms = 2.0 * (i - 1) / (p * p)
    cum = np.cumsum(terms)
    ks = list(range(every, K + 1, every))
    if not ks or ks[-1] != K:
        ks.append(K)
    return [(k, float(cum[k - 1])) for k in ks]


def asymptotic_tail(K: int, primes: PrimeTable | None = None) -> float:
    """Heuristic remainder 2/ln p(K), from pi(x) ~ x/ln x; not a bound."""
    p = _first_primes(K, primes)
    return 2.0 / math.log(p[-1])


@dataclass(frozen=True)
class MoveReport:
    measured: float
    predicted: float
    difference: float
    terms: int
    updates: int
    first_decile: float
    last_decile: float

    @property
    def decile_spread(self) -> float:
        """Relative difference between the first and last decile means."""
        mid = (self.first_decile + self.last_decile) / 2
        return abs(self.first_decile - self.last_decile) / mid if mid else 0.0

    @property
    def flat(self) -> bool:
        return self.decile_spread < 0.10


def compare_measured_moves(stats: RunStats, K: int = DEFAULT_TERMS, *,
                           min_updates: int = 10**7,
                           primes: PrimeTable | None = None) -> MoveReport:
    """Measured V1 moves per tested position against the truncated series."""
    if stats.updates == 0 or stats.width <= 0:
        raise ValueError("empty statistics")
    if stats.variant != "V1":
        raise ValueError(f"move statistics must come from V1, got {stats.variant}")
    if stats.updates < min_updates:
        raise ValueError(f"need at least {min_updates} updates, got {stats.updates}")
    predicted = total_move_series(K, primes).value
    measured = stats.moves_per_position
    per_dec = stats.decile_moves_per_position()
    return MoveReport(measured, predicted, abs(measured - predicted), K, stats.updates,
                      per_dec[0], per_dec[-1])
