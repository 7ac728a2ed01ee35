"""Range search: all maximal non-square-free runs of length >= lmin starting in [start, end)."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from ..oracle import GapRecord, PrimeTable, window_gaps
from . import kernels as K
from .state import SieveState, level_of, prime_bound


@dataclass
class RunStats:
    variant: str
    start: int
    end: int
    lmin: int
    updates: int = 0
    moves: int = 0
    skips: int = 0
    candidates: int = 0
    tests: int = 0
    trial_divisions: int = 0
    jumped: int = 0
    records: int = 0
    seconds: float = 0.0
    decile_moves: list[int] = field(default_factory=lambda: [0] * 10)
    decile_updates: list[int] = field(default_factory=lambda: [0] * 10)

    @property
    def width(self) -> int:
        return self.end - self.start

    @property
    def moves_per_position(self) -> float:
        return self.moves / self.width

    def decile_moves_per_position(self) -> list[float]:
        w = (self.width + 9) // 10
        sizes = [min(w, max(0, self.width - i * w)) for i in range(10)]
        return [m / s if s else 0.0 for m, s in zip(self.decile_moves, sizes)]

    def merge(self, other: "RunStats") -> None:
        """Accumulate a neighbouring unit's counters (range becomes the hull)."""
        for name in ("updates", "moves", "skips", "candidates", "tests",
                     "trial_divisions", "jumped", "records"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.seconds += other.seconds
        self.start = min(self.start, other.start)
        self.end = max(self.end, other.end)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    starts: np.ndarray
    lengths: np.ndarray
    stats: RunStats

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def records(self) -> Iterator[GapRecord]:
        for s, l in zip(self.starts.tolist(), self.lengths.tolist()):
            yield GapRecord(s, l)


def search(start: int, end: int, lmin: int, variant: str = "V6",
           primes: PrimeTable | None = None, *, strict: bool = False) -> SearchResult:
    """Every maximal run of length >= ``lmin`` whose first element lies in [start, end).

    The scan begins a little before ``start`` and runs a little past ``end``
    so that each run is seen whole; runs are owned by the range containing
    their first element, so adjacent ranges never report the same run.
    """
    level = level_of(variant)
    start = max(int(start), 1)
    end = int(end)
    if end <= start:
        raise ValueError(f"empty range [{start}, {end})")
    if primes is None:
        primes = PrimeTable.up_to(prime_bound(end))
    stats = RunStats(f"V{level}", start, end, int(lmin))
    t0 = time.perf_counter()
    if level == 0:
        starts, lengths = window_gaps(start, end, lmin, primes)
    else:
        st = SieveState(f"V{level}", start, end, lmin, primes, strict=strict,
                        first=max(1, start - K.OFF))
        st.run()
        starts, lengths = st.record_arrays()
        for k, v in st.stats.items():
            setattr(stats, k, v)
        dm, du = st.decile_counts()
        stats.decile_moves = dm.tolist()
        stats.decile_updates = du.tolist()
    stats.seconds = time.perf_counter() - t0
    stats.records = len(starts)
    return SearchResult(np.asarray(starts, dtype=np.int64), np.asarray(lengths, dtype=np.int64), stats)


def first_occurrences(starts: np.ndarray, lengths: np.ndarray) -> dict[int, int]:
    """Least start for each exact length present."""
    out: dict[int, int] = {}
    for s, l in zip(starts.tolist(), lengths.tolist()):
        if l not in out or s < out[l]:
            out[l] = s
    return out
