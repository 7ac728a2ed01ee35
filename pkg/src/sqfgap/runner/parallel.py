"""Split a range into units and run them on worker processes.

Results are concatenated in unit order, so the output never depends on
which worker finished first or how many there were.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..engine.search import RunStats
from ..engine.state import prime_bound
from ..oracle import PrimeTable
from .checkpoint import DEFAULT_CHUNK, checkpoint_path, run_unit
from .ledger import Ledger, records_digest

DEFAULT_UNIT = 10**9


def split_range(start: int, end: int, unit: int = DEFAULT_UNIT) -> list[tuple[int, int]]:
    """Consecutive half-open pieces of at most ``unit`` numbers."""
    if end <= start:
        raise ValueError(f"empty range [{start}, {end})")
    if unit < 1:
        raise ValueError("unit size must be positive")
    return [(a, min(a + unit, end)) for a in range(start, end, unit)]


_TABLE: PrimeTable | None = None


def _worker(args):
    global _TABLE
    start, end, lmin, variant, ckpt, chunk, bound = args
    if _TABLE is None or _TABLE.limit < bound:
        _TABLE = PrimeTable.up_to(bound)
    return run_unit(start, end, lmin, variant, _TABLE, checkpoint=ckpt, chunk=chunk)


def run_range(start: int, end: int, lmin: int, variant: str = "V7", *, workers: int = 1,
              unit: int | None = None, chunk: int = DEFAULT_CHUNK,
              checkpoint_dir: str | os.PathLike | None = None,
              ledger: Ledger | None = None, owner: str = "-"
              ) -> tuple[np.ndarray, np.ndarray, RunStats]:
    """Search [start, end) as a set of units, optionally checkpointed and ledgered."""
    variant = variant.upper()
    workers = max(1, int(workers))
    if unit is None:
        unit = max(chunk, -(-(end - start) // workers))
    pieces = split_range(start, end, unit)
    bound = prime_bound(end)
    if ledger is not None:
        for a, b in pieces:
            ledger.claim(a, b, lmin, owner)
    jobs = [(a, b, lmin, variant,
             None if checkpoint_dir is None else checkpoint_path(checkpoint_dir, a, b, lmin, variant),
             chunk, bound) for a, b in pieces]
    if workers == 1 or len(jobs) == 1:
        table = PrimeTable.up_to(bound)
        results = [run_unit(a, b, l, v, table, checkpoint=c, chunk=ch)
                   for a, b, l, v, c, ch, _ in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    stats = RunStats(variant, start, end, lmin)
    for (a, b), (s, l, st) in zip(pieces, results):
        stats.merge(st)
        if ledger is not None:
            ledger.complete(a, b, lmin, records_digest(zip(s.tolist(), l.tolist())), owner)
    starts = np.concatenate([r[0] for r in results]) if results else np.zeros(0, np.int64)
    lengths = np.concatenate([r[1] for r in results]) if results else np.zeros(0, np.int64)
    stats.records = len(starts)
    if checkpoint_dir is not None:
        for *_, c, _, _ in jobs:
            Path(c).unlink(missing_ok=True)
    return starts, lengths, stats
