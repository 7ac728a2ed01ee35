import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfgap.engine import MAXRUN, VARIANTS, VariantError, init_state, search, split_sizes
from sqfgap.oracle import GapRecord, PrimeTable, naive_window_sieve, window_gaps

INCREMENTAL = VARIANTS[1:]


@pytest.fixture(scope="module")
def table():
    return PrimeTable.up_to(5000)


# ---------------------------------------------------------------- worked states


def test_initial_state_is_least_multiple_above_n(table):
    p2, nsqf = init_state("V1", 21, 10**6, 3, table).nsqf_by_p2()
    assert list(zip(p2[:5].tolist(), nsqf[:5].tolist())) == [(4, 24), (9, 27), (25, 25), (49, 49), (121, 121)]
    for start in (0, 1):
        p2, nsqf = init_state("V1", start, 10**6, 3, table).nsqf_by_p2()
        assert np.array_equal(p2, nsqf)


def test_v1_pops_keep_sorted_order_with_p2_tiebreak(table):
    s = init_state("V1", 21, 10**6, 3, table)
    assert s.ordered()[:3] == [(24, 4), (25, 25), (27, 9)]
    assert s.advance().position == 24
    assert s.ordered()[:3] == [(25, 25), (27, 9), (28, 4)]
    assert s.advance().position == 25
    assert s.ordered()[:4] == [(27, 9), (28, 4), (49, 49), (50, 25)]


def test_v2_skip_rule(table):
    s = init_state("V2", 40, 10**6, 7, table)
    assert s.advance() == ("nonsquarefree", 40, None)
    assert s.ordered()[:6] == [(44, 4), (45, 9), (49, 49), (50, 25), (121, 121), (169, 169)]
    ev = s.advance()
    # nsqf[NP2min[7]-1] = 169 > 44 + 7, so nothing before 163 can start a run of 7
    assert ev.kind == "skip" and ev.position == 163
    assert s.ordered()[:6] == [(164, 4), (169, 169), (171, 9), (175, 25), (196, 49), (242, 121)]


def test_v4_residue_cache(table):
    s = init_state("V4", 289, 10**6, 7, table)
    assert s.base == 5
    assert s.examine() == (288, 289)
    assert s.modcache.tolist() == [1, 1, 14, 44, 47]


def test_v5_closeness_skip(table):
    s = init_state("V5", 338, 10**6, 7, table)
    assert s.base == 4
    assert [v for v, _ in s.ordered()[:5]] == [338, 361, 363, 529, 578]
    # second large value 361 > 338 + 6
    assert s.test_candidate().kind == "passed"


def test_v6_chain_insert_starts_below_head(table):
    s = init_state("V6", 361, 10**6, 7, table)
    assert s.head_slot == 7
    assert [s.slot_nsqf(i) for i in (4, 5, 6, 8)] == [363, 507, 578, 529]
    before = s.stats["moves"]
    s.advance()
    # 722 goes straight after slot 6 (578): one comparison, and 363 becomes the head
    assert s.stats["moves"] - before == 1
    assert s.head_slot == 4


def test_v7_third_value_screen(table):
    s = init_state("V7", 363, 10**6, 7, table)
    assert [v for v, _ in s.ordered()[:3]] == [363, 392, 507]
    assert s.test_candidate().kind == "passed"


def test_v7_emits_record(table):
    s = init_state("V7", 840, 10**6, 5, table)
    recs = []
    while not s.done and s.position < 900:
        ev = s.advance()
        if ev.record:
            recs.append(ev.record)
    assert recs == [GapRecord(844, 5)]


# ---------------------------------------------------------------- configuration


def test_split_sizes_and_strict_mode():
    assert split_sizes(3, 14) == (9, 1)
    assert split_sizes(5, 14) == (8, 2)
    assert split_sizes(7, 14) == (7, 3)
    # small lengths clamp the base at zero unless strict
    assert split_sizes(7, 3) == (0, 3)
    with pytest.raises(VariantError):
        split_sizes(7, 3, strict=True)
    with pytest.raises(VariantError):
        init_state("V7", 1, 1000, 3, strict=True)


def test_bad_arguments(table):
    with pytest.raises(VariantError):
        init_state("V0", 1, 100, 3, table)
    with pytest.raises(ValueError):
        init_state("V9", 1, 100, 3, table)
    with pytest.raises(ValueError):
        search(10, 5, 3)
    with pytest.raises(VariantError):
        init_state("V2", 1, 100, 3, table).test_candidate()


# ---------------------------------------------------------------- equivalence


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("L", [1, 2, 3, 5, 7])
def test_variants_match_window_sieve(variant, L, table):
    s, l = window_gaps(1, 300_000, L, table)
    res = search(1, 300_000, L, variant, table)
    assert np.array_equal(res.starts, s) and np.array_equal(res.lengths, l)


@given(st.integers(1, 10**9), st.integers(1, 20_000), st.integers(1, 6),
       st.sampled_from(INCREMENTAL))
@settings(max_examples=80, deadline=None)
def test_random_ranges_match_oracle(lo, width, L, variant):
    t = PrimeTable.up_to(40_000)
    s, l = window_gaps(lo, lo + width, L, t)
    res = search(lo, lo + width, L, variant, t)
    assert res.starts.tolist() == s.tolist() and res.lengths.tolist() == l.tolist()


@given(st.integers(1, 10**6), st.integers(2, 50_000), st.data())
@settings(max_examples=40, deadline=None)
def test_adjacent_ranges_partition_records(lo, width, data):
    t = PrimeTable.up_to(2000)
    cut = data.draw(st.integers(lo + 1, lo + width - 1))
    variant = data.draw(st.sampled_from(INCREMENTAL))
    whole = search(lo, lo + width, 2, variant, t)
    left = search(lo, cut, 2, variant, t)
    right = search(cut, lo + width, 2, variant, t)
    assert whole.starts.tolist() == left.starts.tolist() + right.starts.tolist()


def test_records_are_maximal_and_long_enough(table):
    res = search(10**7, 10**7 + 10**6, 4, "V6", table)
    nonsqf = ~naive_window_sieve(10**7 - 1, 10**7 + 10**6 + 70, table)
    for r in res.records:
        off = r.start - (10**7 - 1)
        assert r.length >= 4
        assert nonsqf[off:off + r.length].all()
        assert not nonsqf[off - 1] and not nonsqf[off + r.length]


# ---------------------------------------------------------------- statistics


def test_statistics_are_counted(table):
    v1 = search(1, 10**6, 5, "V1", table).stats
    v2 = search(1, 10**6, 5, "V2", table).stats
    v6 = search(1, 10**6, 5, "V6", table).stats
    assert v1.updates > 0 and v1.moves > 0 and v1.skips == 0
    assert v2.skips > 0 and v2.jumped > 0 and v2.moves < v1.moves
    assert v6.tests > 0 and v6.candidates >= v6.tests
    # over-scan past the range end is counted in totals but in no decile
    assert 0 < v1.moves - sum(v1.decile_moves) < 100
    assert sum(v1.decile_updates) <= v1.updates


def test_maxrun_guard_constant():
    assert MAXRUN >= 64
