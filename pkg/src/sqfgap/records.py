"""Published first occurrences, their prime witnesses, and the ``N: L`` line format."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, TextIO

from .oracle import GapRecord

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KnownRecord:
    """First run of exactly ``length`` non-square-free integers.

    ``witnesses[j]`` lists primes whose squares divide ``qgap + j``; most
    offsets have one, a few have two.
    """

    length: int
    qgap: int
    witnesses: tuple[tuple[int, ...], ...]
    reporter: str

    def __post_init__(self):
        if len(self.witnesses) != self.length:
            raise ValueError(f"L={self.length}: {len(self.witnesses)} witness entries")

    def check_witnesses(self) -> list[int]:
        """Offsets whose listed squares do not divide ``qgap + j`` (empty when all hold)."""
        return [j for j, ps in enumerate(self.witnesses)
                if not ps or any((self.qgap + j) % (p * p) for p in ps)]


def _w(text: str) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(p) for p in item.split("x")) for item in text.split(","))


KNOWN: tuple[KnownRecord, ...] = (
    KnownRecord(1, 4, _w("2"), "E. Friedman"),
    KnownRecord(2, 8, _w("2,3"), "E. Friedman"),
    KnownRecord(3, 48, _w("2,7,5"), "E. Friedman"),
    KnownRecord(4, 242, _w("11,3,2,7"), "E. Friedman"),
    KnownRecord(5, 844, _w("2,13,3,11,2"), "E. Friedman"),
    KnownRecord(6, 22020, _w("2,19,11,3,2,5"), "E. Friedman"),
    KnownRecord(7, 217070, _w("7,3,2,113,11,5,2"), "E. Friedman"),
    KnownRecord(8, 1092747, _w("19,2,7,5,11,2,3,13"), "E. Friedman"),
    KnownRecord(9, 8870024, _w("2,5,11,29,2,7,31,3,2"), "P. De Geest"),
    KnownRecord(10, 262315467, _w("3,2,29,2957,79,2,7,17,5,2x3"), "D. Bernier"),
    KnownRecord(11, 221167422, _w("3,31,2,5,37,13,2,7,11,3,2"), "P. De Geest"),
    KnownRecord(12, 47255689915, _w("7,2,3,103,43,2,29,17,13,2,5,3"), "L. Marmet"),
    KnownRecord(13, 82462576220, _w("2,3,13,23,2,5,17,41,2,19,3,7,2"), "L. Marmet"),
    KnownRecord(14, 1043460553364, _w("2,3,7,19,2,13x59,67,43,2,181,3,5,2,11"), "L. Marmet"),
    KnownRecord(15, 79180770078548, _w("2,3,5,29,2,13,17,53,2,19,3,41,2,31,67"), "L. Marmet"),
    KnownRecord(16, 3215226335143218, _w("11,23,2,3,269,53,2,5,17,163,2,101,3,19,2,137"),
                "Z. McGregor-Dorsey"),
    KnownRecord(17, 23742453640900972, _w("2,11x23,127,5,2,3,53,37,2,7,13,17,2,19,3,29,2"), "E. Wong"),
    KnownRecord(18, 125781000834058568, _w("2,3,37,31,2,19,29,5,2,7x23,3,139,2,11,17,13,2,199"),
                "L. Marmet"),
)

KNOWN_BY_LENGTH = {r.length: r for r in KNOWN}

# constructed upper limits for the first run of each length, L = 16..24
WONG_BOUNDS: dict[int, int] = {
    16: 46717595829767167,
    17: 23742453640900972,
    18: 125781000834058568,
    19: 31310794237768728712,
    20: 148372453443663297638331,
    21: 321362101382225854472,
    22: 213922449434979698424416,
    23: 687445369966391012821156868,
    24: 28548715276566524078226797585011,
}

FIXTURES = {
    14: "gaps_min14.txt",
    15: "gaps_min15.txt",
    16: "gaps_min16.txt",
}


class RecordParseError(ValueError):
    def __init__(self, lineno: int, line: str, source: str = "<input>"):
        super().__init__(f"{source}:{lineno}: cannot parse {line!r} as 'N: L'")
        self.lineno = lineno


_LINE = re.compile(r"^\s*(\d[\d\s]*?)\s*:\s*(\d+)\s*$")


def format_record(record: GapRecord | tuple[int, int]) -> str:
    start, length = (record.start, record.length) if isinstance(record, GapRecord) else record
    return "%d: %d\n" % (start, length)


def parse_line(line: str, lineno: int = 1, source: str = "<input>") -> GapRecord:
    m = _LINE.match(line)
    if not m:
        raise RecordParseError(lineno, line.rstrip("\n"), source)
    try:
        return GapRecord(int(re.sub(r"\s", "", m.group(1))), int(m.group(2)))
    except ValueError:
        raise RecordParseError(lineno, line.rstrip("\n"), source) from None


def parse_records(lines: Iterable[str], source: str = "<input>") -> list[GapRecord]:
    """Parse ``N: L`` lines; blank and ``#`` lines are skipped, duplicates
    dropped with a warning, and the result sorted by start."""
    seen: dict[int, GapRecord] = {}
    prev = -1
    unsorted = False
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rec = parse_line(line, lineno, source)
        if rec.start in seen:
            if seen[rec.start] != rec:
                raise ValueError(f"{source}:{lineno}: {rec} conflicts with {seen[rec.start]}")
            log.warning("%s:%d: duplicate record %s dropped", source, lineno, rec)
            continue
        if rec.start < prev:
            unsorted = True
        prev = rec.start
        seen[rec.start] = rec
    if unsorted:
        log.warning("%s: records out of order; sorted", source)
    return sorted(seen.values())


def read_records(fh: TextIO, source: str | None = None) -> list[GapRecord]:
    return parse_records(fh, source or getattr(fh, "name", "<input>"))


def write_records(fh: TextIO, records: Iterable[GapRecord | tuple[int, int]]) -> int:
    n = 0
    for rec in records:
        fh.write(format_record(rec))
        n += 1
    return n


def fixture_lines(min_len: int) -> Iterator[str]:
    """Raw lines of the bundled list of runs with length >= ``min_len``."""
    name = FIXTURES[min_len]
    with resources.files("sqfgap.data").joinpath(name).open("r", encoding="ascii") as fh:
        yield from fh


def load_fixture(min_len: int) -> list[GapRecord]:
    return parse_records(fixture_lines(min_len), FIXTURES[min_len])
