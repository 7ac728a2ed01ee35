"""Minimum number of distinct squared primes able to cover L consecutive integers.

A squared prime p**2 can hit at most ceil(L / p**2) positions of a window of
length L, and no set of k distinct primes can do better than the k smallest.
``np2min`` is therefore the least k whose best-case capacity reaches L. This is
always a valid lower bound, which is all the sieve's skip rules rely on.
:func:`exact_min_cover` solves the covering problem outright for small L. The
two agree for most L but not all: at L = 10 the 4- and 9-classes cannot avoid
overlapping, so a real cover needs 8 primes while the bound says 7.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Callable

PUBLISHED = (1, 2, 3, 4, 4, 5, 6, 7, 7, 7, 8, 9, 9, 10, 11, 12, 12)

# largest L for which exact_min_cover has been run against the formula
EXACT_CHECKED = 20


@lru_cache(maxsize=None)
def _small_primes(count: int) -> tuple[int, ...]:
    out: list[int] = []
    n = 2
    while len(out) < count:
        if all(n % p for p in out if p * p <= n):
            out.append(n)
        n += 1
    return tuple(out)


def _primes(count: int) -> tuple[int, ...]:
    size = 64
    while size < count:
        size *= 2
    return _small_primes(size)[:count]


def capacity(length: int, k: int) -> int:
    """Most positions of a length-``length`` window that the k smallest squared primes can hit."""
    return sum(-(-length // (p * p)) for p in _primes(k))


@lru_cache(maxsize=None)
def np2min(length: int) -> int:
    if length < 1:
        raise ValueError("gap length must be >= 1")
    k = 1
    while capacity(length, k) < length:
        k += 1
    return k


def np2min_table(max_length: int) -> list[int]:
    """``[np2min(1), ..., np2min(max_length)]``."""
    return [np2min(L) for L in range(1, max_length + 1)]


def exact_min_cover(length: int) -> int:
    """Exhaustive minimum of distinct primes whose squares cover ``length`` consecutive integers.

    Only primes with p**2 < length can cover more than one position; every
    other prime is interchangeable with any other and covers exactly one. So
    the search runs over residue choices for the few small primes and pays one
    prime for each position left uncovered.
    """
    if length < 1:
        raise ValueError("gap length must be >= 1")
    small = [p * p for p in _primes(64) if p * p < length]
    full = (1 << length) - 1
    # options[i]: bitmask of positions covered by small[i] for each residue, 0 = unused
    options = []
    for q in small:
        opts = [0]
        for r in range(q):
            bits = 0
            for j in range(r, length, q):
                bits |= 1 << j
            opts.append(bits)
        options.append(opts)
    best = length
    for choice in product(*options):
        used = sum(1 for c in choice if c)
        covered = 0
        for c in choice:
            covered |= c
        best = min(best, used + bin(full & ~covered).count("1"))
    return best


def np2min_mismatches(fn: Callable[[int], int] = np2min) -> list[tuple[int, int, int]]:
    """``(L, computed, published)`` for every L in 1..17 where ``fn`` disagrees."""
    return [(L, fn(L), want) for L, want in enumerate(PUBLISHED, start=1) if fn(L) != want]


def verify_np2min_against_paper(fn: Callable[[int], int] = np2min) -> bool:
    return not np2min_mismatches(fn)


def label(length: int) -> str:
    """How far ``np2min(length)`` is established: exact, lower bound only, or unchecked."""
    if length > EXACT_CHECKED:
        return "heuristic"
    return "exact" if exact_min_cover(length) == np2min(length) else "lower-bound"
