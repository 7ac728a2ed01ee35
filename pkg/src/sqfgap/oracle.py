"""Ground-truth primitives: prime tables, trial division, Moebius values and a
segmented window sieve that crosses out multiples of p**2.

Everything here is plain numpy and deliberately shares no code with the
incremental engine in :mod:`sqfgap.engine`, so it can serve as the reference
that the engine is checked against.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from math import isqrt
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

INT64_LIMIT = 1 << 63
DEFAULT_SEGMENT = 1 << 20
MAX_WINDOW = 1 << 27
# positions are kept below this so that N + p**2 never leaves int64
POSITION_LIMIT = 1 << 62

_CHUNK = 1 << 20


class PrimeTableTooSmall(ValueError):
    pass


class WindowTooLarge(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GapRecord:
    """A maximal run of consecutive non-square-free integers."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 1:
            raise ValueError(f"gap start must be >= 1, got {self.start}")
        if self.length < 1:
            raise ValueError(f"gap length must be >= 1, got {self.length}")

    @property
    def stop(self) -> int:
        """First position after the run (square-free by maximality)."""
        return self.start + self.length

    def __str__(self) -> str:
        return f"{self.start}: {self.length}"


def _sieve_odd(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index k stands for 2k+1
    odd = np.ones(limit // 2 + 1, dtype=bool)
    odd[0] = False
    for k in range(1, (isqrt(limit) - 1) // 2 + 1):
        if odd[k]:
            p = 2 * k + 1
            odd[p * p // 2::p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    primes = primes[primes <= limit]
    return np.concatenate((np.array([2], dtype=np.int64), primes))


class PrimeTable:
    """All primes <= ``limit``, ascending, immutable once built.

    Squares are computed lazily and cached because most consumers want p**2
    rather than p.
    """

    def __init__(self, primes: np.ndarray, limit: int):
        primes = np.ascontiguousarray(primes, dtype=np.int64)
        primes.flags.writeable = False
        self._primes = primes
        self.limit = int(limit)
        self._squares: np.ndarray | None = None

    @classmethod
    def up_to(cls, limit: int) -> "PrimeTable":
        if limit < 0:
            raise ValueError("limit must be non-negative")
        return cls(_sieve_odd(int(limit)), limit)

    @classmethod
    def cached(cls, limit: int, cache_dir: str | os.PathLike | None = None) -> "PrimeTable":
        """Like :meth:`up_to` but memoised on disk as ``.npy`` (uint32 when it fits)."""
        directory = Path(cache_dir or os.environ.get("SQFGAP_CACHE", Path.home() / ".cache" / "sqfgap"))
        path = directory / f"primes-{int(limit)}.npy"
        if path.exists():
            try:
                return cls(np.load(path).astype(np.int64), limit)
            except (OSError, ValueError):
                log.warning("ignoring unreadable prime cache %s", path)
        table = cls.up_to(limit)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp.npy")
            dtype = np.uint32 if limit < (1 << 32) else np.int64
            np.save(tmp, table.primes.astype(dtype))
            os.replace(tmp, path)
        except OSError as exc:
            log.warning("could not write prime cache %s: %s", path, exc)
        return table

    @property
    def primes(self) -> np.ndarray:
        return self._primes

    @property
    def squares(self) -> np.ndarray:
        if self._squares is None:
            sq = self._primes * self._primes
            sq.flags.writeable = False
            self._squares = sq
        return self._squares

    def __len__(self) -> int:
        return len(self._primes)

    def count_upto(self, x: int) -> int:
        """Number of primes <= x (x must not exceed the table limit)."""
        return int(np.searchsorted(self._primes, x, side="right"))

    def require(self, bound: int) -> None:
        if bound > self.limit:
            raise PrimeTableTooSmall(f"prime table covers p <= {self.limit}, need p <= {bound}")

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={len(self)})"


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if n >= INT64_LIMIT:
        raise ValueError(f"n={n} does not fit in 63 bits")
    return n


def is_squarefree(n: int, primes: PrimeTable) -> bool:
    """Trial division by every p**2 <= n."""
    n = _check_n(n)
    root = isqrt(n)
    primes.require(root)
    sq = primes.squares[: primes.count_upto(root)]
    nn = np.int64(n)
    for lo in range(0, len(sq), _CHUNK):
        if np.any(nn % sq[lo:lo + _CHUNK] == 0):
            return False
    return True


def mobius(n: int, primes: PrimeTable) -> int:
    n = _check_n(n)
    if not is_squarefree(n, primes):
        return 0
    ps = primes.primes[: primes.count_upto(isqrt(n))]
    nn = np.int64(n)
    k = 0
    rest = n
    for lo in range(0, len(ps), _CHUNK):
        block = ps[lo:lo + _CHUNK]
        for p in block[nn % block == 0].tolist():
            rest //= p
            k += 1
    if rest > 1:
        k += 1
    return -1 if k % 2 else 1


def naive_window_sieve(lo: int, hi: int, primes: PrimeTable, *, max_window: int = MAX_WINDOW) -> np.ndarray:
    """Boolean mask over [lo, hi): ``mask[n - lo]`` is True iff n is square-free.

    Multiples of every p**2 <= hi - 1 are crossed out. Squares narrower than
    the window are struck with strided slices; the rest hit the window at most
    once, so their first multiple is computed for all of them at once.
    """
    lo, hi = int(lo), int(hi)
    if lo < 1:
        raise ValueError("window must start at 1 or later")
    if hi <= lo:
        raise ValueError(f"empty window [{lo}, {hi})")
    if hi > POSITION_LIMIT:
        raise ValueError("window end exceeds 2**62")
    width = hi - lo
    if width > max_window:
        raise WindowTooLarge(f"window of {width} numbers exceeds the budget of {max_window}")
    root = isqrt(hi - 1)
    primes.require(root)
    sq = primes.squares[: primes.count_upto(root)]
    mask = np.ones(width, dtype=bool)
    n_small = int(np.searchsorted(sq, width, side="left"))
    for s in sq[:n_small].tolist():
        mask[(-lo) % s::s] = False
    lo64 = np.int64(lo)
    for a in range(n_small, len(sq), _CHUNK):
        first = (-lo64) % sq[a:a + _CHUNK]
        mask[first[first < width]] = False
    return mask


def _runs(nonsqf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start offsets and (exclusive) end offsets of True-runs."""
    edges = np.diff(np.concatenate(([0], nonsqf.view(np.int8), [0])))
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)


def window_gaps(lo: int, hi: int, min_len: int, primes: PrimeTable, *,
                segment: int = DEFAULT_SEGMENT) -> tuple[np.ndarray, np.ndarray]:
    """Maximal non-square-free runs of length >= min_len starting in [lo, hi).

    Returns ``(starts, lengths)`` as int64 arrays, ascending. The sieve reads
    one position before ``lo`` and keeps going past ``hi`` until the last run
    is closed, so every reported run is maximal.
    """
    lo, hi, min_len = int(lo), int(hi), int(min_len)
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    if lo < 1 or hi <= lo:
        raise ValueError(f"invalid range [{lo}, {hi})")
    out_s: list[np.ndarray] = []
    out_l: list[np.ndarray] = []
    pos = max(1, lo - 1)
    open_start = -1  # start of a run that touches the end of the previous segment
    while True:
        if pos <= hi:
            seg_hi = min(pos + segment, hi + 1)
        else:
            seg_hi = pos + 64
        nonsqf = ~naive_window_sieve(pos, seg_hi, primes, max_window=max(segment, 64))
        s, e = _runs(nonsqf)
        s = s + pos
        e = e + pos
        if open_start >= 0:
            if len(s) and s[0] == pos:
                s[0] = open_start
            else:
                # the carried run ended exactly at the segment boundary
                s = np.concatenate(([open_start], s))
                e = np.concatenate(([pos], e))
            open_start = -1
        if len(s) and e[-1] == seg_hi:
            open_start = int(s[-1])
            s, e = s[:-1], e[:-1]
        length = e - s
        keep = (s >= lo) & (s < hi) & (length >= min_len)
        if keep.any():
            out_s.append(s[keep])
            out_l.append(length[keep])
        pos = seg_hi
        if pos > hi and open_start < 0:
            break
        if open_start >= hi:
            # a run that starts at or after hi is not ours; stop once it is past
            open_start = -1
            break
    if not out_s:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(out_s).astype(np.int64), np.concatenate(out_l).astype(np.int64)


def enumerate_gaps_bruteforce(lo: int, hi: int, min_len: int, primes: PrimeTable) -> list[GapRecord]:
    starts, lengths = window_gaps(lo, hi, min_len, primes)
    return [GapRecord(s, l) for s, l in zip(starts.tolist(), lengths.tolist())]


def verify_run(start: int, length: int, primes: PrimeTable) -> tuple[bool, str]:
    """Check that [start, start+length) is a maximal non-square-free run.

    Returns ``(ok, reason)``; the reason names the first offending number.
    """
    start, length = int(start), int(length)
    if start < 2 or length < 1:
        return False, "run must start after 1 and have positive length"
    mask = naive_window_sieve(start - 1, start + length + 1, primes)
    if not mask[0]:
        return False, f"{start - 1} is not square-free"
    if not mask[-1]:
        return False, f"{start + length} is not square-free"
    inside = mask[1:-1]
    if inside.any():
        n = start + int(np.flatnonzero(inside)[0])
        return False, f"{n} is square-free"
    return True, "ok"
