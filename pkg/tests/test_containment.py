import random
from itertools import combinations, permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpat.containment import (
    CapError,
    MatcherState,
    NextTable,
    Occurrence,
    contains_subsequence,
    find_occurrence,
    find_regular_occurrence,
    is_complete,
    is_regular_occurrence,
    is_superpattern,
    matcher_feed,
    regular_ranges,
)
from superpat.patterns import PatternError, Word, canonicalize, decode, enumerate_pa


def w(text, d=None):
    return Word.parse(text, d)


def test_contains_subsequence():
    assert contains_subsequence(decode("1221"), decode("21"))
    assert contains_subsequence(decode("1221"), ())
    assert not contains_subsequence(decode("111"), decode("12"))
    for target in ("11", "12", "21", "22"):
        assert contains_subsequence(decode("1221"), decode(target))


@given(st.lists(st.integers(1, 3), max_size=10), st.lists(st.integers(1, 3), max_size=4))
def test_next_table_agrees_with_greedy(word, target):
    assert NextTable(word, 3).contains(target) == contains_subsequence(word, target)


def _occurs_brute(word, pattern):
    pattern = canonicalize(pattern)
    return any(canonicalize([word[i] for i in idx]) == pattern
               for idx in combinations(range(len(word)), len(pattern)))


def test_find_occurrence_examples():
    occ = find_occurrence(w("3213213"), decode("123"))
    assert occ is not None
    assert occ.image(decode("123")) == tuple(w("3213213")[i] for i in occ.positions)
    assert find_occurrence(w("1231241", 4), decode("112")) is not None
    assert find_occurrence(w("121", 2), decode("122")) is None
    assert not _occurs_brute(decode("121"), decode("122"))
    with pytest.raises(PatternError, match="more distinct letters"):
        find_occurrence(w("12", 2), decode("123"))


@settings(max_examples=300)
@given(st.integers(1, 4).flatmap(
    lambda d: st.tuples(st.just(d), st.lists(st.integers(1, d), max_size=10),
                        st.lists(st.integers(1, d), min_size=1, max_size=4))))
def test_find_occurrence_matches_brute_force(case):
    d, word, raw = case
    pattern = canonicalize(raw)
    occ = find_occurrence(word, pattern, d)
    assert (occ is not None) == _occurs_brute(word, pattern)
    if occ is not None:
        assert [word[i] for i in occ.positions] == [occ.assignment[v] for v in pattern]


def _occurrence_for(word_text, pattern_text):
    """Treat the whole word as an occurrence of the pattern."""
    word, pattern = decode(word_text), decode(pattern_text)
    assignment = {v: c for v, c in zip(pattern, word)}
    return Word(word, 6), Occurrence(tuple(range(len(word))), assignment), pattern


@pytest.mark.parametrize("text, regular", [("113363", True), ("225565", True), ("113343", False)])
def test_regular_occurrence_example(text, regular):
    word, occ, pattern = _occurrence_for(text, "112232")
    assert is_regular_occurrence(word, occ, pattern) is regular


def test_regular_ranges_count_with_multiplicity():
    ranges = regular_ranges(decode("112232"))
    assert ranges == {1: range(1, 3), 2: range(3, 6), 3: range(6, 7)}


def test_regular_occurrence_rejects_invalid():
    word = Word(decode("123"), 3)
    bad = Occurrence((0, 1, 2), {1: 2, 2: 1, 3: 3})
    with pytest.raises(PatternError):
        is_regular_occurrence(word, bad, decode("123"))


def test_is_complete_examples():
    assert is_complete(decode("121"), 2)
    assert is_complete(decode("3213213"), 3)
    assert not is_complete(decode("111111"), 3)
    with pytest.raises(CapError, match="too large"):
        is_complete(decode("1"), 13)


def test_is_superpattern_examples():
    assert is_superpattern(w("3213213"), 3, 3)
    assert is_superpattern(w("43514342634"), 4, 6)
    assert is_superpattern(w("1221"), 2, 2)
    for word in product(range(1, 4), repeat=6):
        assert not is_superpattern(word, 3, 3)


def _all_words(d, max_len):
    for n in range(max_len + 1):
        yield from product(range(1, d + 1), repeat=n)


@pytest.mark.parametrize("k, max_len", [(2, 6), (3, 7)])
def test_three_notions_coincide(k, max_len):
    for word in _all_words(k, max_len):
        regular = is_superpattern(word, k, k, require_regular=True)
        plain = is_superpattern(word, k, k, direct=True)
        complete = is_complete(word, k)
        assert regular == plain == complete, word


def test_three_notions_coincide_random_k4():
    rng = random.Random(4)
    base = decode("123412314213")
    words = [tuple(rng.randint(1, 4) for _ in range(rng.randint(11, 14))) for _ in range(400)]
    # padded complete words so that the "true" side is exercised too
    for _ in range(100):
        padded = list(base)
        for _ in range(rng.randint(0, 2)):
            padded.insert(rng.randint(0, len(padded)), rng.randint(1, 4))
        words.append(tuple(padded))
    trues = 0
    for word in words:
        regular = is_superpattern(word, 4, 4, require_regular=True)
        plain = is_superpattern(word, 4, 4, direct=True)
        assert regular == plain == is_complete(word, 4)
        trues += regular
    assert trues >= 100


@given(st.lists(st.integers(1, 3), min_size=7, max_size=11), st.data())
def test_superpattern_monotone_under_insertion(word, data):
    if is_superpattern(word, 3, 3, direct=True):
        pos = data.draw(st.integers(0, len(word)))
        letter = data.draw(st.integers(1, 3))
        longer = word[:pos] + [letter] + word[pos:]
        assert is_superpattern(longer, 3, 3, direct=True)


@given(st.lists(st.integers(1, 3), max_size=10), st.permutations([1, 2, 3]))
def test_relabeling_invariance(word, relabel):
    image = [relabel[c - 1] for c in word]
    assert is_complete(word, 3) == is_complete(image, 3)
    assert is_superpattern(word, 3, 3, direct=True) == is_superpattern(image, 3, 3, direct=True)


def test_regular_implies_plain_implies_complete_k3_len8():
    for word in product(range(1, 4), repeat=8):
        if is_superpattern(word, 3, 3, require_regular=True):
            assert is_superpattern(word, 3, 3, direct=True)
        if is_superpattern(word, 3, 3, direct=True):
            assert is_complete(word, 3)


def test_find_regular_occurrence_is_regular():
    word = w("43514342634")
    for pattern in enumerate_pa(3, 6):
        occ = find_regular_occurrence(word, pattern)
        if occ is not None:
            assert is_regular_occurrence(word, occ, pattern)


# --- matcher ---------------------------------------------------------------


def _feed(k, letters):
    state = MatcherState.start(k)
    steps = []
    for c in letters:
        state = matcher_feed(state, c)
        steps.append(state)
    return steps


def test_matcher_examples():
    steps = _feed(3, [3, 2, 1, 3, 2, 1, 3])
    assert [s.complete for s in steps] == [False] * 6 + [True]
    steps = _feed(2, [1, 2, 1])
    assert [s.complete for s in steps] == [False, False, True]
    assert not any(s.complete for s in _feed(2, [1] * 20))
    with pytest.raises(PatternError):
        matcher_feed(MatcherState.start(2), 3)


@given(st.lists(st.integers(1, 3), max_size=25))
def test_matcher_agrees_with_batch_check(letters):
    state = MatcherState.start(3)
    perms = list(permutations((1, 2, 3)))
    for n, c in enumerate(letters, start=1):
        before = state.frontier
        state = matcher_feed(state, c)
        assert all(b <= a for a, b in zip(state.frontier, before))
        assert state.completed_count == sum(f == 3 for f in state.frontier)
        assert state.complete == is_complete(letters[:n], 3)
        for p, f in zip(perms, state.frontier):
            assert contains_subsequence(letters[:n], p[:f])
