"""Checks of the published first occurrences against the engine and the oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import isqrt
from typing import Callable, Sequence

from .engine.search import search
from .engine.state import prime_bound
from .oracle import GapRecord, PrimeTable, verify_run
from .records import KNOWN, KNOWN_BY_LENGTH


@dataclass
class FirstsResult:
    """First run of each exact length and of each length-or-more, both tracked
    separately because a longer run can come before a shorter one."""

    max_len: int
    exact: dict[int, int] = field(default_factory=dict)
    at_least: dict[int, int] = field(default_factory=dict)
    scanned_to: int = 1

    def mismatches(self) -> list[int]:
        return [L for L in range(1, self.max_len + 1)
                if L in KNOWN_BY_LENGTH and self.exact.get(L) != KNOWN_BY_LENGTH[L].qgap]


def check_factors() -> dict[int, list[int]]:
    """Offsets whose witness squares fail, per table row (all lists empty when the table holds)."""
    return {r.length: r.check_witnesses() for r in KNOWN}


def scan_firsts(max_len: int, *, variant: str = "V7", limit: int | None = None,
                chunk: int = 10**6, max_chunk: int = 10**8,
                progress: Callable[[int], None] | None = None) -> FirstsResult:
    """Scan upward from 1 until every length 1..max_len has its first exact occurrence.

    Each chunk only asks the engine for runs at least as long as the shortest
    length still missing, so later chunks skip cheaply.
    """
    res = FirstsResult(max_len)
    pos = 1
    while True:
        missing = [L for L in range(1, max_len + 1) if L not in res.exact]
        if not missing or (limit is not None and pos >= limit):
            break
        hi = pos + chunk if limit is None else min(pos + chunk, limit)
        found = search(pos, hi, missing[0], variant)
        for s, l in zip(found.starts.tolist(), found.lengths.tolist()):
            res.exact.setdefault(l, s)
            for k in range(missing[0], min(l, max_len) + 1):
                res.at_least.setdefault(k, s)
        pos = hi
        res.scanned_to = pos
        chunk = min(chunk * 2, max_chunk)
        if progress:
            progress(pos)
    res.exact = {L: s for L, s in sorted(res.exact.items()) if L <= max_len}
    return res


@dataclass
class VerifyOutcome:
    record: GapRecord
    ok: bool
    reason: str


def verify_records(records: Sequence[GapRecord], primes: PrimeTable | None = None) -> list[VerifyOutcome]:
    """Oracle check that each record is a maximal run of exactly its length."""
    if not records:
        return []
    if primes is None:
        top = max(r.start + r.length for r in records)
        primes = PrimeTable.cached(isqrt(top) + 1)
    return [VerifyOutcome(r, *verify_run(r.start, r.length, primes)) for r in records]


def sample(records: Sequence[GapRecord], count: int | None, seed: int = 0) -> list[GapRecord]:
    if count is None or count >= len(records):
        return list(records)
    return sorted(random.Random(seed).sample(list(records), count))


def prime_table_for(end: int) -> PrimeTable:
    return PrimeTable.up_to(prime_bound(end))
