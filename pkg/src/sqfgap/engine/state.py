"""Incremental sieve state for variants V1..V7 and a step-by-step API over it."""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import NamedTuple

import numpy as np

from ..np2min import np2min
from ..oracle import POSITION_LIMIT, GapRecord, PrimeTable
from . import kernels as K

VARIANTS = ("V0", "V1", "V2", "V3", "V4", "V5", "V6", "V7")

# how many of the NP2min squares must come from outside the base
_CLOSENESS = {3: 1, 4: 1, 5: 2, 6: 2, 7: 3}

_EVENT_NAMES = {
    K.EV_NONE: "none",
    K.EV_NONSQF: "nonsquarefree",
    K.EV_SKIP: "skip",
    K.EV_TESTED: "tested",
    K.EV_PASSED: "passed",
    K.EV_DEDUP: "seen",
    K.EV_DONE: "done",
}


class VariantError(ValueError):
    """A variant cannot be configured for the requested gap length."""


class Event(NamedTuple):
    kind: str
    position: int
    record: GapRecord | None


def level_of(variant: str) -> int:
    v = variant.upper()
    if v not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    return int(v[1])


def prime_bound(end: int) -> int:
    """Largest prime a scan of [.., end) can need, including the over-scan past ``end``."""
    return isqrt(end + 2 * K.OFF) + 1


def split_sizes(level: int, lmin: int, strict: bool = False) -> tuple[int, int]:
    """``(base, m)``: base squares handled arithmetically, and how many
    large-square values must sit within ``lmin - 1`` of a candidate.

    For small ``lmin`` the nominal base size goes non-positive; by default the
    split is clamped so every variant still runs, ``strict`` refuses instead.
    """
    k = np2min(lmin)
    nominal = _CLOSENESS[level]
    if k - nominal < 1 and strict:
        raise VariantError(
            f"V{level} needs NP2min[{lmin}] >= {nominal + 1}, got {k}")
    m = min(nominal, k)
    return k - m, m


class SieveState:
    """Mutable sieve positioned at ``N``; the next position to process is N+1.

    Parameters mirror :func:`init_state`. ``first`` is where scanning starts;
    records are only reported when they start inside [start, end).
    """

    def __init__(self, variant: str, start: int, end: int, lmin: int,
                 primes: PrimeTable | None = None, *, strict: bool = False,
                 first: int | None = None):
        level = level_of(variant)
        if level == 0:
            raise VariantError("V0 is the window sieve and has no incremental state")
        start, end, lmin = int(start), int(end), int(lmin)
        if lmin < 1:
            raise ValueError("lmin must be >= 1")
        if end <= start:
            raise ValueError(f"empty range [{start}, {end})")
        if end + 4 * K.OFF >= POSITION_LIMIT:
            raise ValueError("range end too close to 2**62")
        first = start if first is None else int(first)
        bound = prime_bound(end)
        if primes is None:
            primes = PrimeTable.up_to(bound)
        primes.require(bound)
        count = primes.count_upto(bound)
        self.variant = f"V{level}"
        self.level = level
        self.primes = primes
        self.start, self.end, self.lmin = start, end, lmin
        self.count = count

        n = count + 1
        sq = primes.squares[:count].astype(np.int64)
        self._sqasc = np.ascontiguousarray(sq)
        n0 = max(first - 1, 0)
        p2 = np.empty(n, dtype=np.int64)
        nsqf = np.empty(n, dtype=np.int64)
        p2[:count] = sq
        nsqf[:count] = (n0 // sq + 1) * sq
        p2[count] = nsqf[count] = K.INT64_MAX
        nxt = np.zeros(n, dtype=np.int64)

        k = np2min(lmin)
        cfg_level = level
        idx = 0
        if level <= 2:
            base, m = 0, 0
            if level == 2:
                idx = k - 1
                if idx >= count:
                    # fewer squares than a run needs: nothing to find, so no skipping either
                    cfg_level = 1
        else:
            base, m = split_sizes(level, lmin, strict)
            base = min(base, count)
        self.base, self.closeness = base, m

        head = base
        if level <= 5:
            order = np.lexsort((p2[base:count], nsqf[base:count])) + base
            p2[base:count] = p2[order]
            nsqf[base:count] = nsqf[order]
        else:
            nxt[count] = count
            order = np.lexsort((np.arange(base, count), nsqf[base:count])) + base
            if len(order):
                nxt[order[:-1]] = order[1:]
                nxt[order[-1]] = count
                head = int(order[0])
            else:
                head = count

        self._p2, self._nsqf, self._nxt = p2, nsqf, nxt
        self._sqb = np.ascontiguousarray(sq[:base])
        cols = -(np.arange(2 * K.OFF + 1, dtype=np.int64) - K.OFF)
        self._negmod = np.ascontiguousarray(cols[None, :] % np.maximum(self._sqb, 1)[:, None])
        self._modc = np.zeros(max(base, 1), dtype=np.int64)
        self._ring = np.zeros(K.RING, dtype=np.int64)
        self._collect = np.zeros(K.COLLECT, dtype=np.int64)
        sc = np.zeros(K.SC_SIZE, dtype=np.int64)
        sc[K.SC_N] = n0
        sc[K.SC_HEAD] = head
        sc[K.SC_LAST_EXAM] = -1
        sc[K.SC_RUN_S] = sc[K.SC_RUN_E] = -1
        sc[K.SC_JUMP] = -1
        self._sc = sc
        self._st = np.zeros(K.ST_SIZE, dtype=np.int64)
        cfg = np.zeros(K.CF_SIZE, dtype=np.int64)
        cfg[K.CF_LEVEL] = cfg_level
        cfg[K.CF_BASE] = base
        cfg[K.CF_MCLOSE] = m
        cfg[K.CF_L] = lmin
        cfg[K.CF_IDX] = idx
        cfg[K.CF_START] = start
        cfg[K.CF_END] = end
        cfg[K.CF_N] = n
        self._cfg = cfg
        self._rec_s = np.zeros(16, dtype=np.int64)
        self._rec_l = np.zeros(16, dtype=np.int64)
        self._nrec = 0
        self.done = False

    # ------------------------------------------------------------ running

    def run(self, max_events: int = 1 << 62) -> bool:
        """Process up to ``max_events`` events; True once the range is exhausted."""
        if self.done:
            return True
        if self.level <= 2:
            out = K.run_full(self._p2, self._nsqf, self._sqasc, self._sc, self._st,
                             self._cfg, max_events, self._rec_s, self._rec_l, self._nrec)
        else:
            out = K.run_split(self._p2, self._nsqf, self._nxt, self._sqb,
                              self._negmod, self._modc, self._ring, self._sc, self._st, self._cfg,
                              self._collect, max_events, self._rec_s, self._rec_l, self._nrec)
        self._rec_s, self._rec_l, self._nrec, done = out
        self.done = bool(done)
        return self.done

    def advance(self) -> Event:
        """Process exactly one event (one pop, skip or candidate)."""
        if self.done:
            return Event("done", self.position, None)
        self.run(1)
        return self._event()

    def test_candidate(self) -> Event:
        """Screen and, if it survives, examine the current head without moving past it."""
        if self.level <= 2:
            raise VariantError("test_candidate applies to V3..V7")
        self._sc[K.SC_EV_START] = self._sc[K.SC_EV_LEN] = 0
        kind = K.test_at_head(self._p2, self._nsqf, self._nxt, self._sqb, self._negmod,
                              self._modc, self._ring, self._sc, self._st, self._cfg,
                              self._collect)
        self._sc[K.SC_EV_KIND] = kind
        self._sc[K.SC_EV_POS] = self.head_value
        return self._event()

    def examine(self) -> tuple[int, int]:
        """Maximal non-square-free run ``(first, last)`` through the head (V3..V7)."""
        if self.level <= 2:
            raise VariantError("examine applies to V3..V7")
        l, r = K.examine(self._p2, self._nsqf, self._nxt, self._sqb, self._negmod,
                         self._modc, self._ring, self._sc, self._st, self._cfg, self._collect)
        return int(l), int(r)

    def _event(self) -> Event:
        sc = self._sc
        rec = GapRecord(int(sc[K.SC_EV_START]), int(sc[K.SC_EV_LEN])) if sc[K.SC_EV_LEN] else None
        return Event(_EVENT_NAMES[int(sc[K.SC_EV_KIND])], int(sc[K.SC_EV_POS]), rec)

    # ------------------------------------------------------------ inspection

    @property
    def position(self) -> int:
        """N, the last position processed."""
        return int(self._sc[K.SC_N])

    @property
    def head_value(self) -> int:
        """Smallest pending multiple in the ordered (large) part."""
        return int(K.head_value(self._nsqf, self._nxt, self._sc, self._cfg))

    @property
    def head_slot(self) -> int:
        """Slot index of the chain head (V6/V7; ordering by p2, 0-based)."""
        return int(self._sc[K.SC_HEAD])

    @property
    def modcache(self) -> np.ndarray:
        """Residues of the last examined candidate modulo each base square (V4+)."""
        return self._modc[: self.base].copy()

    @property
    def records(self) -> list[GapRecord]:
        return [GapRecord(int(s), int(l)) for s, l in
                zip(self._rec_s[: self._nrec], self._rec_l[: self._nrec])]

    def record_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rec_s[: self._nrec].copy(), self._rec_l[: self._nrec].copy()

    @property
    def stats(self) -> dict[str, int]:
        st = self._st
        return {
            "updates": int(st[K.ST_UPDATES]),
            "moves": int(st[K.ST_MOVES]),
            "skips": int(st[K.ST_SKIPS]),
            "candidates": int(st[K.ST_CANDIDATES]),
            "tests": int(st[K.ST_TESTS]),
            "trial_divisions": int(st[K.ST_TRIAL]),
            "jumped": int(st[K.ST_JUMPED]),
        }

    def decile_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Moves and updates attributed to each tenth of [start, end)."""
        st = self._st
        return (st[K.ST_DEC_MOVES:K.ST_DEC_MOVES + 10].copy(),
                st[K.ST_DEC_UPDATES:K.ST_DEC_UPDATES + 10].copy())

    def nsqf_by_p2(self) -> tuple[np.ndarray, np.ndarray]:
        """``(p2, nsqf)`` ordered by ascending p2, whatever the internal layout.

        Base squares of V3+ are not tracked incrementally; their entry is the
        smallest multiple above N.
        """
        c = self.count
        p2 = self._p2[:c].copy()
        nsqf = self._nsqf[:c].copy()
        if self.base:
            b = self.base
            nsqf[:b] = (self.position // p2[:b] + 1) * p2[:b]
        order = np.argsort(p2, kind="stable")
        return p2[order], nsqf[order]

    def ordered(self) -> list[tuple[int, int]]:
        """Pending ``(nsqf, p2)`` pairs of the ordered part in their current order."""
        c = self.count
        if self.level >= 6:
            out = []
            i = self.head_slot
            while i != c:
                out.append((int(self._nsqf[i]), int(self._p2[i])))
                i = int(self._nxt[i])
            return out
        b = self.base
        return list(zip(self._nsqf[b:c].tolist(), self._p2[b:c].tolist()))

    def slot_nsqf(self, slot: int) -> int:
        return int(self._nsqf[slot])


def init_state(variant: str, start: int, end: int, lmin: int,
               primes: PrimeTable | None = None, *, strict: bool = False) -> SieveState:
    """Sieve positioned at N = start - 1: every entry is the least multiple of its square above N."""
    return SieveState(variant, start, end, lmin, primes, strict=strict)
