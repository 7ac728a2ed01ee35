import pytest

from sqfgap.np2min import (PUBLISHED, capacity, exact_min_cover, label, np2min,
                           np2min_mismatches, np2min_table, verify_np2min_against_paper)


def test_table_matches_published_row():
    assert tuple(np2min_table(17)) == PUBLISHED == (1, 2, 3, 4, 4, 5, 6, 7, 7, 7, 8, 9, 9, 10, 11, 12, 12)
    assert verify_np2min_against_paper()
    assert np2min_mismatches() == []


def test_mismatch_reporting():
    assert np2min_mismatches(lambda L: 1) [0] == (2, 1, 2)
    assert not verify_np2min_against_paper(lambda L: L)


@pytest.mark.parametrize("L", range(1, 30))
def test_monotone_and_minimal(L):
    k = np2min(L)
    assert capacity(L, k) >= L
    assert k == 1 or capacity(L, k - 1) < L
    assert np2min(L + 1) >= k


# exhaustive covers, computed by brute force over all residue choices
EXACT = [1, 2, 3, 4, 4, 5, 6, 7, 7, 8, 8, 9, 9, 10, 11, 12, 12, 13, 14, 14]


def test_exhaustive_cover():
    assert [exact_min_cover(L) for L in range(1, 21)] == EXACT


@pytest.mark.parametrize("L", range(1, 21))
def test_bound_never_exceeds_exact(L):
    assert np2min(L) <= exact_min_cover(L)


def test_labels():
    assert label(9) == "exact"
    assert label(10) == "lower-bound"
    assert label(19) == "lower-bound"
    assert label(21) == "heuristic"


def test_rejects_nonpositive():
    with pytest.raises(ValueError):
        np2min(0)
