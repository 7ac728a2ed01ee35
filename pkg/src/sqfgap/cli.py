"""Command-line interface: ``sqfgap <command> ...``.

Exit status: 0 success, 1 a check failed, 2 bad usage, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from decimal import Decimal, InvalidOperation
from math import isqrt
from pathlib import Path
from typing import Sequence, TextIO

from . import analysis, catalog, crt
from .engine import VARIANTS, search
from .engine.state import prime_bound
from .np2min import EXACT_CHECKED, exact_min_cover, label, np2min
from .oracle import PrimeTable
from .records import FIXTURES, KNOWN, RecordParseError, load_fixture, read_records, write_records
from .runner import Ledger, LedgerConflict, WorkUnit, merge_ledgers, run_range
from .runner.checkpoint import CheckpointError
from .runner.ledger import filter_records

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("sqfgap")


class UsageError(Exception):
    pass


def integer(text: str) -> int:
    """Integer argument; accepts ``3e8``-style notation and ``_`` separators."""
    try:
        d = Decimal(text.replace("_", ""))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def _variant(text: str) -> str:
    v = text.upper()
    if v not in VARIANTS:
        raise argparse.ArgumentTypeError(f"variant must be one of {', '.join(VARIANTS)}")
    return v


def _open_out(path: str | None) -> TextIO:
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="ascii")


# ------------------------------------------------------------------ commands


def cmd_search(a) -> int:
    if a.start < 1 or a.end <= a.start:
        raise UsageError(f"invalid range [{a.start}, {a.end})")
    if a.min_len < 1:
        raise UsageError("--min-len must be >= 1")
    ledger = Ledger(a.ledger) if a.ledger else None
    t0 = time.perf_counter()
    starts, lengths, stats = run_range(a.start, a.end, a.min_len, a.variant, workers=a.workers,
                                       unit=a.unit, chunk=a.chunk, checkpoint_dir=a.checkpoint_dir,
                                       ledger=ledger, owner=a.owner)
    out = _open_out(a.out)
    try:
        write_records(out, zip(starts.tolist(), lengths.tolist()))
    finally:
        if out is not sys.stdout:
            out.close()
    if a.stats:
        print(f"# {stats.variant} [{a.start}, {a.end}) lmin={a.min_len} records={stats.records} "
              f"candidates={stats.candidates} tests={stats.tests} moves={stats.moves} "
              f"skips={stats.skips} seconds={time.perf_counter() - t0:.2f}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(a) -> int:
    records = []
    for item in a.fixtures:
        if item.startswith("@"):
            records += load_fixture(int(item[1:]))
        else:
            with open(item, encoding="ascii") as fh:
                records += read_records(fh)
    picked = catalog.sample(sorted(set(records)), a.sample, a.seed)
    failed = 0
    for o in catalog.verify_records(picked):
        print(f"{'PASS' if o.ok else 'FAIL'} {o.record}" + ("" if o.ok else f"  ({o.reason})"))
        failed += not o.ok
    print(f"# {len(picked) - failed}/{len(picked)} verified")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_catalog(a) -> int:
    if not a.check_factors and a.check_firsts is None:
        for r in KNOWN:
            wit = ",".join("x".join(map(str, ps)) for ps in r.witnesses)
            print(f"{r.length} {r.qgap} {wit} {r.reporter}")
        return EXIT_OK
    failed = False
    if a.check_factors:
        for L, bad in catalog.check_factors().items():
            print(f"{'PASS' if not bad else 'FAIL'} factors L={L}" + (f" offsets {bad}" if bad else ""))
            failed |= bool(bad)
    if a.check_firsts is not None:
        t0 = time.perf_counter()
        res = catalog.scan_firsts(a.check_firsts, variant=a.variant)
        for L in range(1, a.check_firsts + 1):
            got = res.exact.get(L)
            want = catalog.KNOWN_BY_LENGTH[L].qgap if L in catalog.KNOWN_BY_LENGTH else None
            ok = want is None or got == want
            print(f"{'PASS' if ok else 'FAIL'} first L={L} exact={got} at_least={res.at_least.get(L)}"
                  + ("" if ok else f" expected {want}"))
            failed |= not ok
        print(f"# scanned to {res.scanned_to} in {time.perf_counter() - t0:.1f}s")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_np2min(a) -> int:
    for L in range(1, a.max_len + 1):
        line = f"{L} {np2min(L)} {label(L) if L <= EXACT_CHECKED else 'heuristic'}"
        if a.exact and L <= EXACT_CHECKED:
            line += f" exact={exact_min_cover(L)}"
        print(line)
    return EXIT_OK


def cmd_bounds(a) -> int:
    if a.length < 1:
        raise UsageError("--length must be >= 1")
    res = crt.random_search(a.length, a.trials, a.seed, a.strategy, free=a.free, lifts=a.lifts)
    if res.best is None:
        print(f"# no run of {a.length} found in {res.trials} trials")
        return EXIT_FAIL
    ok = crt.verify_bound(res.best)
    print(res.best.to_line())
    exact = {True: "exact", False: "longer", None: "unknown"}[res.best.exact]
    print(f"# {'verified' if ok else 'FAILED'}; boundary {exact}; "
          f"{res.successes}/{res.trials} trials succeeded")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_series(a) -> int:
    s = analysis.total_move_series(a.terms)
    print(f"terms {s.terms_used}")
    print(f"value {s.value:.12f}")
    print(f"tail_bound {s.tail_estimate:.12f}")
    print(f"bracket {s.value:.6f} {s.upper:.6f}")
    print(f"heuristic_limit {s.value + analysis.asymptotic_tail(a.terms):.6f}")
    return EXIT_OK


def cmd_ledger(a) -> int:
    if a.action == "show":
        for u in Ledger(a.path).units():
            sys.stdout.write(u.to_line())
    elif a.action == "claim":
        print(Ledger(a.path).claim(a.start, a.end, a.min_len, a.owner).to_line(), end="")
    elif a.action == "complete":
        print(Ledger(a.path).complete(a.start, a.end, a.min_len, a.digest, a.owner).to_line(), end="")
    elif a.action == "compact":
        Ledger(a.path).compact()
    elif a.action == "merge":
        la, lb = Ledger(a.path).units(), Ledger(a.other).units()
        ra = rb = None
        if a.records_a and a.records_b:
            with open(a.records_a, encoding="ascii") as fh:
                ra = filter_records([(r.start, r.length) for r in read_records(fh)])
            with open(a.records_b, encoding="ascii") as fh:
                rb = filter_records([(r.start, r.length) for r in read_records(fh)])
        merged = merge_ledgers(la, lb, ra, rb)
        if a.out:
            Ledger(a.out).write(merged)
        else:
            sys.stdout.writelines(u.to_line() for u in merged)
    return EXIT_OK


def cmd_bench(a) -> int:
    if a.end <= a.start:
        raise UsageError(f"invalid range [{a.start}, {a.end})")
    table = PrimeTable.up_to(prime_bound(a.end))
    print("variant seconds records candidates tests moves skips")
    for v in a.variants.split(","):
        v = _variant(v.strip())
        best = None
        for _ in range(a.repeat):
            res = search(a.start, a.end, a.min_len, v, table)
            if best is None or res.stats.seconds < best.stats.seconds:
                best = res
        s = best.stats
        print(f"{v} {s.seconds:.3f} {s.records} {s.candidates} {s.tests} {s.moves} {s.skips}")
    return EXIT_OK


def cmd_plot_csv(a) -> int:
    if a.kind == "qgap":
        print("L,qgap")
        for r in KNOWN:
            print(f"{r.length},{r.qgap}")
    else:
        print("terms,partial_sum")
        for k, v in analysis.partial_sums(a.terms, a.every):
            print(f"{k},{v:.12f}")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqfgap", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="list maximal runs of length >= --min-len in [start, end)")
    s.add_argument("--start", type=integer, required=True)
    s.add_argument("--end", type=integer, required=True)
    s.add_argument("--min-len", type=integer, required=True)
    s.add_argument("--variant", type=_variant, default="V7")
    s.add_argument("--workers", type=integer, default=1)
    s.add_argument("--unit", type=integer, default=None, help="numbers per work unit")
    s.add_argument("--chunk", type=integer, default=10**7, help="numbers between checkpoints")
    s.add_argument("--checkpoint-dir")
    s.add_argument("--ledger")
    s.add_argument("--owner", default="-")
    s.add_argument("--out")
    s.add_argument("--stats", action="store_true", help="summary on stderr")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("verify", help="check 'N: L' lines with the oracle")
    s.add_argument("fixtures", nargs="+",
                   help=f"record files, or @{'/@'.join(map(str, FIXTURES))} for the bundled lists")
    s.add_argument("--sample", type=integer)
    s.add_argument("--seed", type=integer, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("catalog", help="known first occurrences")
    s.add_argument("--check-factors", action="store_true")
    s.add_argument("--check-firsts", type=integer, metavar="L")
    s.add_argument("--variant", type=_variant, default="V7")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("np2min", help="minimum count of squared primes per length")
    s.add_argument("--max-len", type=integer, default=17)
    s.add_argument("--exact", action="store_true", help="also run the exhaustive cover search")
    s.set_defaults(func=cmd_np2min)

    s = sub.add_parser("bounds", help="construct runs by the Chinese remainder theorem")
    s.add_argument("--length", type=integer, required=True)
    s.add_argument("--trials", type=integer, default=10**4)
    s.add_argument("--seed", type=integer, default=0)
    s.add_argument("--strategy", choices=crt.STRATEGIES, default="biased")
    s.add_argument("--free", type=integer, default=crt.DEFAULT_FREE)
    s.add_argument("--lifts", type=integer, default=crt.DEFAULT_LIFTS)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("series", help="truncated expected-move series")
    s.add_argument("--terms", type=integer, default=analysis.DEFAULT_TERMS)
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("ledger", help="inspect or edit a work-unit ledger")
    s.add_argument("action", choices=("show", "claim", "complete", "compact", "merge"))
    s.add_argument("path")
    s.add_argument("other", nargs="?", help="second ledger (merge)")
    s.add_argument("--start", type=integer)
    s.add_argument("--end", type=integer)
    s.add_argument("--min-len", type=integer)
    s.add_argument("--owner", default="-")
    s.add_argument("--digest")
    s.add_argument("--records-a")
    s.add_argument("--records-b")
    s.add_argument("--out")
    s.set_defaults(func=cmd_ledger)

    s = sub.add_parser("bench", help="time variants on one range")
    s.add_argument("--start", type=integer, required=True)
    s.add_argument("--end", type=integer, required=True)
    s.add_argument("--min-len", type=integer, required=True)
    s.add_argument("--variants", default=",".join(VARIANTS[1:]))
    s.add_argument("--repeat", type=integer, default=1)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("plot-csv", help="CSV for plotting")
    s.add_argument("kind", choices=("qgap", "series"))
    s.add_argument("--terms", type=integer, default=10**5)
    s.add_argument("--every", type=integer, default=1000)
    s.set_defaults(func=cmd_plot_csv)
    return p


def _check_ledger_args(a) -> None:
    if a.command != "ledger":
        return
    if a.action in ("claim", "complete") and None in (a.start, a.end, a.min_len):
        raise UsageError(f"ledger {a.action} needs --start, --end and --min-len")
    if a.action == "merge" and not a.other:
        raise UsageError("ledger merge needs a second ledger path")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _check_ledger_args(a)
        return a.func(a)
    except UsageError as exc:
        parser.error(str(exc))
    except (LedgerConflict, CheckpointError) as exc:
        print(f"sqfgap: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except RecordParseError as exc:
        print(f"sqfgap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"sqfgap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sqfgap: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
