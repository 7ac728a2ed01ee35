"""Append-only text ledger of work units.

One line per state change: ``start end lmin status owner completed_at [digest]``.
The latest line for a unit wins; :meth:`Ledger.compact` rewrites the file
with one line per unit. Writers hold an advisory lock on the file.
"""

from __future__ import annotations

import fcntl
import hashlib
import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

STATUSES = ("pending", "running", "done")


class LedgerConflict(Exception):
    pass


@dataclass(frozen=True)
class WorkUnit:
    start: int
    end: int
    lmin: int
    status: str = "pending"
    owner: str = "-"
    completed_at: str | None = None
    digest: str | None = None

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"empty unit [{self.start}, {self.end})")
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if not self.owner or any(c.isspace() for c in self.owner):
            raise ValueError("owner label must be non-empty without whitespace")
        if self.status == "done" and not self.completed_at:
            raise ValueError("done units need a completion time")

    @property
    def key(self) -> tuple[int, int, int]:
        return self.start, self.end, self.lmin

    def overlaps(self, other: "WorkUnit") -> bool:
        return self.start < other.end and other.start < self.end

    def to_line(self) -> str:
        fields = [str(self.start), str(self.end), str(self.lmin), self.status,
                  self.owner, self.completed_at or "-"]
        if self.digest:
            fields.append(self.digest)
        return " ".join(fields) + "\n"

    @classmethod
    def from_line(cls, line: str) -> "WorkUnit":
        f = line.split()
        if len(f) not in (6, 7):
            raise ValueError(f"bad ledger line {line!r}")
        return cls(int(f[0]), int(f[1]), int(f[2]), f[3], f[4],
                   None if f[5] == "-" else f[5], f[6] if len(f) == 7 else None)

    def describe(self) -> str:
        return f"[{self.start}, {self.end}) lmin={self.lmin} {self.status} by {self.owner}"


def records_digest(records: Iterable[tuple[int, int]]) -> str:
    h = hashlib.sha256()
    for s, l in records:
        h.update(b"%d: %d\n" % (s, l))
    return h.hexdigest()[:32]


def now_iso() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def fold(lines: Iterable[str]) -> list[WorkUnit]:
    """Latest state of each unit, ordered by start."""
    units: dict[tuple[int, int, int], WorkUnit] = {}
    for line in lines:
        if line.strip() and not line.startswith("#"):
            u = WorkUnit.from_line(line)
            units[u.key] = u
    return sorted(units.values(), key=lambda u: u.key)


class Ledger:
    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)

    @contextmanager
    def _locked(self) -> Iterator:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a+", encoding="ascii") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                fh.seek(0)
                yield fh
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def units(self) -> list[WorkUnit]:
        if not self.path.exists():
            return []
        with open(self.path, encoding="ascii") as fh:
            return fold(fh)

    def claim(self, start: int, end: int, lmin: int, owner: str = "-") -> WorkUnit:
        """Mark a unit running. Re-claiming an unfinished identical unit is allowed;
        anything overlapping another unit is refused."""
        want = WorkUnit(int(start), int(end), int(lmin), "running", owner)
        with self._locked() as fh:
            for u in fold(fh):
                if u.key == want.key:
                    if u.status == "done":
                        return u
                    continue
                if u.overlaps(want):
                    raise LedgerConflict(f"claim {want.describe()} overlaps {u.describe()}")
            fh.write(want.to_line())
        return want

    def complete(self, start: int, end: int, lmin: int, digest: str | None = None,
                 owner: str | None = None) -> WorkUnit:
        """Mark a unit done. Repeating with the same digest is a no-op."""
        key = (int(start), int(end), int(lmin))
        with self._locked() as fh:
            units = {u.key: u for u in fold(fh)}
            cur = units.get(key)
            if cur is None:
                for u in units.values():
                    if u.overlaps(WorkUnit(*key)):
                        raise LedgerConflict(f"unit [{start}, {end}) overlaps {u.describe()}")
                cur = WorkUnit(*key, owner=owner or "-")
            if cur.status == "done":
                if digest and cur.digest and digest != cur.digest:
                    raise LedgerConflict(f"{cur.describe()} already done with different output")
                return cur
            keep = owner in (None, "-")
            done = replace(cur, status="done", completed_at=now_iso(), digest=digest,
                           owner=cur.owner if keep else owner)
            fh.write(done.to_line())
        return done

    def compact(self) -> None:
        units = self.units()
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w", encoding="ascii") as fh:
            fh.writelines(u.to_line() for u in units)
        os.replace(tmp, self.path)

    def write(self, units: Sequence[WorkUnit]) -> None:
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="ascii") as fh:
            fh.writelines(u.to_line() for u in sorted(units, key=lambda u: u.key))
        os.replace(tmp, self.path)


RecordLookup = Callable[[int, int, int], Sequence[tuple[int, int]]]


def merge_ledgers(a: Sequence[WorkUnit], b: Sequence[WorkUnit],
                  records_a: RecordLookup | None = None,
                  records_b: RecordLookup | None = None) -> list[WorkUnit]:
    """Combine two ledgers, keeping ``a``'s units where they overlap.

    Overlapping done units must agree on their output: identical units by
    digest, differently split ones by the records in the shared interval
    (runs of length >= the larger lmin), which needs both record lookups.
    """
    out = list(a)
    for ub in b:
        clash = [ua for ua in a if ua.overlaps(ub)]
        if not clash:
            out.append(ub)
            continue
        for ua in clash:
            if ua.status != "done" or ub.status != "done":
                if ua.key == ub.key:
                    continue
                raise LedgerConflict(f"{ua.describe()} overlaps unfinished {ub.describe()}")
            if ua.key == ub.key and ua.digest and ub.digest:
                if ua.digest != ub.digest:
                    raise LedgerConflict(f"{ua.describe()} and {ub.describe()} differ in output")
                continue
            if records_a is None or records_b is None:
                raise LedgerConflict(
                    f"{ua.describe()} overlaps {ub.describe()}; records needed to compare")
            lo, hi = max(ua.start, ub.start), min(ua.end, ub.end)
            lmin = max(ua.lmin, ub.lmin)
            ra = [r for r in records_a(lo, hi, lmin)]
            rb = [r for r in records_b(lo, hi, lmin)]
            if ra != rb:
                raise LedgerConflict(
                    f"{ua.describe()} and {ub.describe()} disagree on [{lo}, {hi})")
        # parts of ub not covered by a are added as pending work
        for lo, hi in _uncovered(ub, clash):
            out.append(replace(ub, start=lo, end=hi, status="pending", completed_at=None,
                               digest=None))
    return sorted(out, key=lambda u: u.key)


def _uncovered(u: WorkUnit, cover: Sequence[WorkUnit]) -> list[tuple[int, int]]:
    gaps = []
    pos = u.start
    for c in sorted(cover, key=lambda c: c.start):
        if c.start > pos:
            gaps.append((pos, min(c.start, u.end)))
        pos = max(pos, c.end)
    if pos < u.end:
        gaps.append((pos, u.end))
    return gaps


def filter_records(records: Sequence[tuple[int, int]]) -> RecordLookup:
    """Record lookup over an in-memory, start-sorted record list."""
    def lookup(lo: int, hi: int, lmin: int) -> list[tuple[int, int]]:
        return [(s, l) for s, l in records if lo <= s < hi and l >= lmin]
    return lookup
