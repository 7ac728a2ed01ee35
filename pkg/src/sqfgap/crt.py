"""Runs of non-square-free integers built from the Chinese remainder theorem.

Prescribe a prime p_j for offset j of a window of length L; any solution of
x + j = 0 (mod p_j**2) for all prescribed j puts a square factor on each of
those positions. The few offsets left free are then checked against the
squares of the first thousand primes. Every hit is an explicit run, hence
an upper bound on the first occurrence of a run that long.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt, prod
from typing import Mapping, Sequence

import numpy as np
from numba import njit

from .np2min import _primes
from .oracle import PrimeTable, is_squarefree

SEARCH_PRIMES = 1000
# neighbours up to this size are settled by full trial division
EXACT_CHECK_LIMIT = 10**14
DEFAULT_FREE = 5
DEFAULT_LIFTS = 4096
DEFAULT_POOL = 200
STRATEGIES = ("biased", "uniform")

Assignment = Mapping[int, "int | Sequence[int]"]


@dataclass(frozen=True)
class UpperBoundRecord:
    """``bound .. bound+length-1`` are all non-square-free; ``witnesses[j]``
    holds primes whose squares divide ``bound + j``."""

    length: int
    bound: int
    witnesses: tuple[tuple[int, ...], ...]
    exact: bool | None = None

    def to_line(self) -> str:
        parts = [f"{j}:{'*'.join(map(str, ps))}" for j, ps in enumerate(self.witnesses)]
        return f"{self.length} {self.bound} " + " ".join(parts)

    @classmethod
    def from_line(cls, line: str) -> "UpperBoundRecord":
        fields = line.split()
        length, bound = int(fields[0]), int(fields[1])
        wit: dict[int, tuple[int, ...]] = {}
        for item in fields[2:]:
            j, ps = item.split(":")
            wit[int(j)] = tuple(int(p) for p in ps.split("*"))
        return cls(length, bound, tuple(wit.get(j, ()) for j in range(length)))


def _pairs(assignment: Assignment) -> list[tuple[int, int]]:
    out = []
    for j, ps in assignment.items():
        for p in (ps,) if isinstance(ps, (int, np.integer)) else ps:
            out.append((int(j), int(p)))
    primes = [p for _, p in out]
    if len(set(primes)) != len(primes):
        raise ValueError(f"assignment repeats a prime: {sorted(primes)}")
    return out


def crt_solve(assignment: Assignment) -> int:
    """Least positive x with x + j = 0 (mod p**2) for every ``j -> p``.

    Values may be a prime or a sequence of primes (two witnesses at one offset).
    """
    pairs = _pairs(assignment)
    if not pairs:
        raise ValueError("empty assignment")
    x, mod = 0, 1
    for j, p in pairs:
        q = p * p
        # x + mod*t = -j (mod q)
        t = ((-j - x) * pow(mod, -1, q)) % q
        x += mod * t
        mod *= q
    return x if x > 0 else mod


def modulus(assignment: Assignment) -> int:
    return prod(p * p for _, p in _pairs(assignment))


def assignment_from_witnesses(witnesses: Sequence[Sequence[int]]) -> dict[int, tuple[int, ...]]:
    """First offset at which each prime appears; later repeats follow from it."""
    seen: set[int] = set()
    out: dict[int, tuple[int, ...]] = {}
    for j, ps in enumerate(witnesses):
        fresh = tuple(p for p in ps if p not in seen)
        seen.update(fresh)
        if fresh:
            out[j] = fresh
    return out


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, isqrt(n) + 1))


def complete_pattern(x: int, length: int, assignment: Assignment | None = None,
                     search_primes: int = SEARCH_PRIMES) -> UpperBoundRecord | None:
    """Witness every offset of [x, x+length), or None if some offset has none.

    Prescribed offsets keep their primes (after checking them); every other
    offset gets the smallest of the first ``search_primes`` primes whose
    square divides it.
    """
    x = int(x)
    if x < 1 or length < 1:
        raise ValueError("need x >= 1 and length >= 1")
    given: dict[int, list[int]] = {}
    if assignment:
        for j, p in _pairs(assignment):
            given.setdefault(j, []).append(p)
    pool = _primes(search_primes)
    wit = []
    for j in range(length):
        n = x + j
        if j in given and all(n % (p * p) == 0 for p in given[j]):
            wit.append(tuple(given[j]))
            continue
        for p in pool:
            if n % (p * p) == 0:
                wit.append((p,))
                break
        else:
            return None
    return UpperBoundRecord(length, x, tuple(wit), boundary_status(x, length, search_primes))


def boundary_status(x: int, length: int, search_primes: int = SEARCH_PRIMES) -> bool | None:
    """Whether the run is exactly ``length`` long: False if a neighbour has a
    small square factor, True if both neighbours are proven square-free,
    None when the neighbours are too big to settle by the primes at hand."""
    pool = _primes(search_primes)
    unsettled = []
    for n in (x - 1, x + length):
        if n < 1:
            continue
        for p in pool:
            if p * p > n:
                break
            if n % (p * p) == 0:
                return False
        else:
            if pool[-1] ** 2 < n:
                unsettled.append(n)
    if not unsettled:
        return True
    if max(unsettled) > EXACT_CHECK_LIMIT:
        return None
    table = PrimeTable.up_to(isqrt(max(unsettled)))
    return all(is_squarefree(n, table) for n in unsettled)


def verify_bound(record: UpperBoundRecord) -> bool:
    """Re-check every witness by exact division."""
    if record.bound < 1 or len(record.witnesses) != record.length:
        return False
    for j, ps in enumerate(record.witnesses):
        if not ps:
            return False
        for p in ps:
            if not _is_prime(p) or (record.bound + j) % (p * p):
                return False
    return True


# ------------------------------------------------------------------ search


def _limbs(n: int) -> np.ndarray:
    """Base 2**30 digits, most significant first."""
    out = []
    while True:
        out.append(n & ((1 << 30) - 1))
        n >>= 30
        if not n:
            break
    return np.array(out[::-1], dtype=np.int64)


@njit(cache=True)
def _limbs_mod(limbs, q):
    r = 0
    for a in limbs:
        r = (r * (1 << 30) + a) % q
    return r


@njit(cache=True)
def _inverse(a, q):
    t, nt, r, nr = 0, 1, q, a
    while nr:
        k = r // nr
        t, nt = nt, t - k * nt
        r, nr = nr, r - k * nr
    return t % q


@njit(cache=True)
def _first_lift(x_limbs, m_limbs, sq, free_offs, lifts):
    """Smallest t < lifts with every free offset of x0 + t*M hit by some square, else -1."""
    nf = free_offs.shape[0]
    full = (1 << nf) - 1
    if nf == 0:
        return 0
    mask = np.zeros(lifts, dtype=np.int64)
    for k in range(sq.shape[0]):
        q = sq[k]
        r0 = _limbs_mod(x_limbs, q)
        m = _limbs_mod(m_limbs, q)
        if m == 0:
            for f in range(nf):
                if (r0 + free_offs[f]) % q == 0:
                    for t in range(lifts):
                        mask[t] |= 1 << f
            continue
        inv = _inverse(m, q)
        for f in range(nf):
            t = ((q - (r0 + free_offs[f]) % q) % q) * inv % q
            while t < lifts:
                mask[t] |= 1 << f
                t += q
    for t in range(lifts):
        if mask[t] == full:
            return t
    return -1


def _best_class(uncovered: set[int], q: int, rng: np.random.Generator) -> int | None:
    counts: dict[int, int] = {}
    for j in uncovered:
        counts[j % q] = counts.get(j % q, 0) + 1
    if not counts:
        return None
    top = max(counts.values())
    choices = sorted(r for r, c in counts.items() if c == top)
    return choices[int(rng.integers(len(choices)))]


def draw_pattern(length: int, rng: np.random.Generator, *, free: int = DEFAULT_FREE,
                 strategy: str = "biased", pool_limit: int = DEFAULT_POOL
                 ) -> tuple[dict[int, int], list[int]]:
    """One random assignment and the offsets left for the free search.

    ``biased`` puts 2 and then 3 on the residue classes covering the most
    uncovered offsets and shuffles larger primes over the rest; ``uniform``
    shuffles primes from the whole pool, 2 and 3 included, onto single offsets.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not 0 <= free <= 5:
        raise ValueError("free offsets must be between 0 and 5")
    pool = [p for p in _primes(SEARCH_PRIMES) if p < pool_limit]
    uncovered = set(range(length))
    assignment: dict[int, int] = {}
    if strategy == "biased":
        for p in (2, 3):
            q = p * p
            r = _best_class(uncovered, q, rng)
            if r is None:
                break
            hit = {j for j in uncovered if j % q == r}
            assignment[min(hit)] = p
            uncovered -= hit
        pool = [p for p in pool if p > 3]
    rest = sorted(uncovered)
    rng.shuffle(rest)
    nfree = min(free, len(rest))
    free_offs = sorted(rest[:nfree])
    targets = rest[nfree:]
    if len(targets) > len(pool):
        raise ValueError(f"prime pool below {pool_limit} too small for length {length}")
    chosen = rng.choice(len(pool), size=len(targets), replace=False)
    for j, c in zip(targets, chosen):
        assignment[j] = pool[int(c)]
    return assignment, free_offs


@dataclass
class BoundSearch:
    best: UpperBoundRecord | None
    trials: int
    successes: int


def random_search(length: int, trials: int, seed: int, strategy: str = "biased", *,
                  free: int = DEFAULT_FREE, lifts: int = DEFAULT_LIFTS,
                  pool_limit: int = DEFAULT_POOL) -> BoundSearch:
    """Seeded random patterns; returns the smallest verified run found.

    Each trial solves one assignment for x0 and then scans x0 + t*M for
    t < ``lifts`` (M the product of prescribed squares), accepting the first
    lift whose free offsets all have a square factor among the first thousand
    primes.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if lifts < 1:
        raise ValueError("lifts must be >= 1")
    rng = np.random.default_rng(seed)
    sq = np.array([p * p for p in _primes(SEARCH_PRIMES)], dtype=np.int64)
    best_x: int | None = None
    best_assignment: dict[int, int] = {}
    successes = 0
    for _ in range(int(trials)):
        assignment, free_offs = draw_pattern(length, rng, free=free, strategy=strategy,
                                             pool_limit=pool_limit)
        x0 = crt_solve(assignment)
        m = modulus(assignment)
        t = _first_lift(_limbs(x0), _limbs(m), sq, np.array(free_offs, dtype=np.int64), lifts)
        if t < 0:
            continue
        successes += 1
        x = x0 + t * m
        if best_x is None or x < best_x:
            best_x, best_assignment = x, assignment
    if best_x is None:
        return BoundSearch(None, int(trials), 0)
    rec = complete_pattern(best_x, length, best_assignment)
    if rec is None or not verify_bound(rec):
        raise AssertionError(f"constructed run at {best_x} failed verification")
    return BoundSearch(rec, int(trials), successes)
