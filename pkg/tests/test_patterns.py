import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpat.patterns import (
    PatternError,
    Word,
    bounds_report,
    canonicalize,
    count_pa,
    decode,
    encode,
    enumerate_pa,
    fubini,
    newey_conjecture,
    stirling2,
)


def strs(patterns):
    return {str(p) for p in patterns}


@pytest.mark.parametrize("word, expected", [
    ("334", "112"), ("111", "111"), ("223", "112"),
    ("113", "112"), ("114", "112"), ("224", "112"), ("3213213", "3213213"),
])
def test_canonicalize_examples(word, expected):
    assert str(canonicalize(decode(word))) == expected


def test_canonicalize_empty():
    with pytest.raises(PatternError, match="empty pattern"):
        canonicalize([])


def test_enumerate_small_cases():
    assert strs(enumerate_pa(3, 2)) == {"111", "112", "121", "211", "122", "212", "221"}
    three = strs(enumerate_pa(3, 3))
    assert len(three) == 13
    assert three - strs(enumerate_pa(3, 2)) == {"123", "132", "213", "231", "312", "321"}
    assert strs(enumerate_pa(1, 5)) == {"1"}


def _dense_rankings_brute(k):
    # independent of enumerate_pa: canonicalize every word over [k]
    return {canonicalize(w) for w in product(range(1, k + 1), repeat=k)}


def test_enumerate_four_matches_brute_force():
    got = enumerate_pa(4, 4)
    assert len(got) == 75
    assert set(got) == _dense_rankings_brute(4)


def test_enumerate_sorted_and_unique():
    got = enumerate_pa(4, 3)
    assert got == sorted(set(got))


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("d", range(1, 7))
def test_enumerate_count_is_stirling_sum(k, d):
    expected = sum(math.factorial(j) * stirling2(k, j) for j in range(1, min(k, d) + 1))
    assert len(enumerate_pa(k, d)) == expected == count_pa(k, d)


@pytest.mark.parametrize("k", range(1, 6))
def test_enumerate_saturates_at_d_equal_k(k):
    assert enumerate_pa(k, k + 3) == enumerate_pa(k, k)


def test_stirling_table():
    assert [stirling2(4, j) for j in range(5)] == [0, 1, 7, 6, 1]


@pytest.mark.parametrize("k, value", [(0, 1), (1, 1), (2, 3), (3, 13), (4, 75), (5, 541), (6, 4683)])
def test_fubini_values(k, value):
    assert fubini(k) == value


@pytest.mark.parametrize("k", range(1, 7))
def test_fubini_counts_enumeration(k):
    assert fubini(k) == len(enumerate_pa(k, k))


def test_fubini_reports_overflow():
    assert fubini(15, max_value=2**63 - 1) == 230283190977853
    with pytest.raises(OverflowError):
        fubini(30, max_value=2**63 - 1)


def test_bounds_examples():
    assert bounds_report(2).prop1_lower == 3
    b4 = bounds_report(4)
    assert (b4.prop1_lower, b4.newey_conjecture, b4.burstein_upper) == (12, 12, 12)
    b10 = bounds_report(10)
    assert (b10.prop1_lower, b10.rado_upper, b10.burstein_upper) == (63, 83, 84)
    with pytest.raises(PatternError):
        bounds_report(1)


def test_bounds_relations():
    for k in range(2, 101):
        b = bounds_report(k)
        assert b.prop1_lower <= b.rado_upper
        # ceil of the rational expression, checked in floating point
        assert b.rado_upper == math.ceil(k * k - 7 * k / 3 + 19 / 3 - 1e-9)
    for k in range(4, 8):
        assert newey_conjecture(k) == k * k - 2 * k + 4


def test_conjecture_small_rows():
    assert [newey_conjecture(k) for k in (1, 2, 3)] == [1, 3, 7]
    # m = 3 row: k^2 - 3k + (4 + 4 + 3)
    assert newey_conjecture(8) == 64 - 24 + 11


def test_word_encoding_round_trip():
    w = Word.parse("43514342634")
    assert w.d == 6 and len(w) == 11
    assert str(w) == "43514342634"
    wide = Word((1, 10, 3), 12)
    assert str(wide) == "1,10,3"
    assert Word.parse(str(wide), 12) == wide
    assert encode((1, 2), 9) == "12"
    with pytest.raises(PatternError):
        Word((1, 4), 3)
    with pytest.raises(PatternError):
        decode("12a")


def _isomorphic_brute(u, v):
    if len(u) != len(v):
        return False
    return all((u[i] < u[j]) == (v[i] < v[j]) and (u[i] == u[j]) == (v[i] == v[j])
               for i in range(len(u)) for j in range(len(u)))


words9 = st.lists(st.integers(1, 9), min_size=1, max_size=8)


@given(words9)
def test_canonicalize_idempotent(w):
    c = canonicalize(w)
    assert canonicalize(c) == c
    assert set(c) == set(range(1, c.j + 1))


@settings(max_examples=300)
@given(words9, words9)
def test_canonicalize_detects_isomorphism(u, v):
    assert (canonicalize(u) == canonicalize(v)) == _isomorphic_brute(u, v)


@given(words9)
def test_canonicalize_equal_for_shifted_copy(w):
    shifted = [2 * x + 5 for x in w]
    assert canonicalize(shifted) == canonicalize(w)
