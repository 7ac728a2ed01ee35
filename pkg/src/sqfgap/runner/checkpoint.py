"""Resumable execution of one work unit.

A unit is processed in chunks; after each chunk the records so far and the
resume position go to a small text file, written atomically. Because runs
belong to the chunk holding their first element, a resumed unit produces
exactly the records of an uninterrupted one.

File layout (version 1)::

    # sqfgap-checkpoint 1 config=<hash>
    unit <start> <end> <lmin> <variant>
    resume <position>
    stats <name>=<value> ...
    records <count>
    <start>: <length>
    ...
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine.search import RunStats, search
from ..engine.state import prime_bound
from ..oracle import PrimeTable
from ..records import parse_line

VERSION = 1
MAGIC = "# sqfgap-checkpoint"
DEFAULT_CHUNK = 10**7
_STAT_FIELDS = ("updates", "moves", "skips", "candidates", "tests", "trial_divisions", "jumped")


class CheckpointError(ValueError):
    pass


class Interrupted(Exception):
    """Raised by :func:`run_unit` when asked to stop early (used to test resuming)."""


def config_hash(start: int, end: int, lmin: int, variant: str) -> str:
    return hashlib.sha256(f"{start} {end} {lmin} {variant.upper()}".encode()).hexdigest()[:16]


@dataclass
class Checkpoint:
    start: int
    end: int
    lmin: int
    variant: str
    resume: int
    stats: dict[str, int] = field(default_factory=dict)
    records: list[tuple[int, int]] = field(default_factory=list)

    @property
    def config(self) -> str:
        return config_hash(self.start, self.end, self.lmin, self.variant)

    def dumps(self) -> str:
        lines = [f"{MAGIC} {VERSION} config={self.config}",
                 f"unit {self.start} {self.end} {self.lmin} {self.variant}",
                 f"resume {self.resume}",
                 "stats " + " ".join(f"{k}={v}" for k, v in sorted(self.stats.items())),
                 f"records {len(self.records)}"]
        lines += ["%d: %d" % r for r in self.records]
        return "\n".join(lines) + "\n"

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(self.dumps())
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    @classmethod
    def loads(cls, text: str) -> "Checkpoint":
        lines = text.splitlines()
        try:
            head = lines[0].split()
            if " ".join(head[:2]) != MAGIC or int(head[2]) != VERSION:
                raise CheckpointError(f"not a version {VERSION} checkpoint")
            want = head[3].removeprefix("config=")
            _, s, e, lmin, variant = lines[1].split()
            resume = int(lines[2].split()[1])
            stats = {}
            for item in lines[3].split()[1:]:
                k, v = item.split("=")
                stats[k] = int(v)
            count = int(lines[4].split()[1])
            recs = [parse_line(x, i + 6) for i, x in enumerate(lines[5:5 + count])]
        except (IndexError, ValueError) as exc:
            if isinstance(exc, CheckpointError):
                raise
            raise CheckpointError(f"malformed checkpoint: {exc}") from None
        if len(recs) != count:
            raise CheckpointError("checkpoint truncated")
        cp = cls(int(s), int(e), int(lmin), variant, resume, stats,
                 [(r.start, r.length) for r in recs])
        if cp.config != want:
            raise CheckpointError("checkpoint configuration hash does not match its contents")
        return cp

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Checkpoint":
        return cls.loads(Path(path).read_text(encoding="ascii"))


def checkpoint_path(directory: str | os.PathLike, start: int, end: int, lmin: int, variant: str) -> Path:
    return Path(directory) / f"unit-{start}-{end}-L{lmin}-{variant.upper()}.ckpt"


def run_unit(start: int, end: int, lmin: int, variant: str = "V7",
             primes: PrimeTable | None = None, *, checkpoint: str | os.PathLike | None = None,
             chunk: int = DEFAULT_CHUNK, stop_after: int | None = None
             ) -> tuple[np.ndarray, np.ndarray, RunStats]:
    """Search [start, end) chunk by chunk, resuming from ``checkpoint`` if present.

    ``stop_after`` raises :class:`Interrupted` after that many chunks, leaving
    the checkpoint behind as a crash would.
    """
    variant = variant.upper()
    if end <= start:
        raise ValueError(f"empty range [{start}, {end})")
    if primes is None:
        primes = PrimeTable.up_to(prime_bound(end))
    cp = Checkpoint(start, end, lmin, variant, start)
    if checkpoint is not None and Path(checkpoint).exists():
        old = Checkpoint.load(checkpoint)
        if old.config != cp.config:
            raise CheckpointError(f"{checkpoint} belongs to a different configuration")
        cp = old
    stats = RunStats(variant, start, end, lmin)
    for k in _STAT_FIELDS:
        setattr(stats, k, cp.stats.get(k, 0))
    done = 0
    while cp.resume < end:
        if stop_after is not None and done >= stop_after:
            raise Interrupted(f"stopped at {cp.resume}")
        hi = min(cp.resume + chunk, end)
        res = search(cp.resume, hi, lmin, variant, primes)
        cp.records.extend(zip(res.starts.tolist(), res.lengths.tolist()))
        for k in _STAT_FIELDS:
            setattr(stats, k, getattr(stats, k) + getattr(res.stats, k))
        stats.seconds += res.stats.seconds
        cp.resume = hi
        cp.stats = {k: getattr(stats, k) for k in _STAT_FIELDS}
        if checkpoint is not None:
            cp.save(checkpoint)
        done += 1
    stats.records = len(cp.records)
    arr = np.array(cp.records, dtype=np.int64).reshape(-1, 2)
    return arr[:, 0].copy(), arr[:, 1].copy(), stats
