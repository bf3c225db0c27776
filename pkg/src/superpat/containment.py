"""
Occurrence and superpattern predicates.

An occurrence of a pattern with values 1..j in a word over [d] is a strictly
increasing map {1..j} -> {1..d} together with positions where the image word
appears as a subsequence. Equal pattern entries always share one letter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterable, Sequence

from .patterns import PatternError, PrefArrangement, Word, as_pattern, enumerate_pa

PERMUTATION_CAP = 12


class CapError(ValueError):
    """A request would enumerate more permutations than the configured cap."""


def _letters(word) -> tuple[int, ...]:
    if isinstance(word, Word):
        return word.letters
    return tuple(word)


def _alphabet(word, d: int | None) -> int:
    if d is not None:
        return d
    if isinstance(word, Word):
        return word.d
    return max(word, default=1)


def contains_subsequence(word: Iterable[int], target: Iterable[int]) -> bool:
    """Greedy left-to-right scan, O(len(word))."""
    it = iter(_letters(word))
    return all(any(x == t for x in it) for t in _letters(target))


class NextTable:
    """``table[i][c]`` is the first index >= i holding letter c (len(word) if none)."""

    def __init__(self, word, d: int | None = None):
        letters = _letters(word)
        d = _alphabet(word, d)
        n = len(letters)
        self.n = n
        self.d = d
        rows = [None] * (n + 1)
        row = [n] * (d + 1)
        rows[n] = tuple(row)
        for i in range(n - 1, -1, -1):
            row[letters[i]] = i
            rows[i] = tuple(row)
        self.table = rows

    def end_of_match(self, target: Iterable[int]) -> int:
        """Index one past the greedy match of ``target``, or -1 if absent."""
        table, n = self.table, self.n
        i = 0
        for c in target:
            if i >= n:
                return -1
            if c > self.d:
                return -1
            j = table[i][c]
            if j == n:
                return -1
            i = j + 1
        return i

    def contains(self, target: Iterable[int]) -> bool:
        return self.end_of_match(target) >= 0

    def positions(self, target: Iterable[int]) -> tuple[int, ...] | None:
        out = []
        i = 0
        for c in target:
            j = self.table[i][c] if i < self.n else self.n
            if j == self.n:
                return None
            out.append(j)
            i = j + 1
        return tuple(out)


@dataclass(frozen=True)
class Occurrence:
    positions: tuple[int, ...]
    assignment: dict  # pattern value -> alphabet letter

    def image(self, pattern: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.assignment[v] for v in pattern)


def _check_pattern(pattern, d: int) -> PrefArrangement:
    pattern = as_pattern(pattern)
    if pattern.j > d:
        raise PatternError("pattern needs more distinct letters than alphabet")
    return pattern


def find_occurrence(word, pattern, d: int | None = None, table: NextTable | None = None):
    """Some occurrence of ``pattern`` in ``word``, or None.

    Tries every increasing injection of the pattern values into [d] and tests
    the image word with a next-occurrence table.
    """
    d = _alphabet(word, d)
    pattern = _check_pattern(pattern, d)
    if table is None:
        table = NextTable(word, d)
    for letters in combinations(range(1, d + 1), pattern.j):
        image = [letters[v - 1] for v in pattern]
        pos = table.positions(image)
        if pos is not None:
            return Occurrence(pos, dict(zip(range(1, pattern.j + 1), letters)))
    return None


def regular_ranges(pattern) -> dict[int, range]:
    """Allowed letters per pattern value for a regular occurrence.

    A value with ``i`` strictly smaller entries (counted with multiplicity)
    and ``j`` copies must be represented by one of i+1..i+j.
    """
    pattern = as_pattern(pattern)
    ranges = {}
    below = 0
    for v in range(1, pattern.j + 1):
        copies = pattern.count(v)
        ranges[v] = range(below + 1, below + copies + 1)
        below += copies
    return ranges


def is_regular_occurrence(word, occ: Occurrence, pattern, d: int | None = None) -> bool:
    letters = _letters(word)
    pattern = as_pattern(pattern)
    if not _valid_occurrence(letters, occ, pattern):
        raise PatternError("not an occurrence of the pattern in the word")
    ranges = regular_ranges(pattern)
    return all(occ.assignment[v] in ranges[v] for v in ranges)


def _valid_occurrence(letters, occ: Occurrence, pattern) -> bool:
    pos = occ.positions
    if len(pos) != len(pattern):
        return False
    if any(b <= a for a, b in zip(pos, pos[1:])):
        return False
    if pos and not (0 <= pos[0] and pos[-1] < len(letters)):
        return False
    values = sorted(occ.assignment)
    if values != list(range(1, pattern.j + 1)):
        return False
    images = [occ.assignment[v] for v in values]
    if any(b <= a for a, b in zip(images, images[1:])):
        return False
    return all(letters[p] == occ.assignment[v] for p, v in zip(pos, pattern))


def find_regular_occurrence(word, pattern, d: int | None = None, table: NextTable | None = None):
    d = _alphabet(word, d)
    pattern = _check_pattern(pattern, d)
    if table is None:
        table = NextTable(word, d)
    ranges = regular_ranges(pattern)
    values = list(ranges)
    for letters in product(*(ranges[v] for v in values)):
        if letters[-1] > d:
            continue
        image = [letters[v - 1] for v in pattern]
        pos = table.positions(image)
        if pos is not None:
            return Occurrence(pos, dict(zip(values, letters)))
    return None


def all_permutations(k: int, cap: int = PERMUTATION_CAP) -> list[tuple[int, ...]]:
    if k > cap:
        raise CapError(f"permutation set too large: k={k} exceeds cap {cap}")
    return list(permutations(range(1, k + 1)))


def missing_permutation(word, k: int, cap: int = PERMUTATION_CAP):
    """First permutation of [k] (lexicographic) not contained in ``word``."""
    perms = all_permutations(k, cap)
    table = NextTable(word, k)
    for p in perms:
        if not table.contains(p):
            return p
    return None


def is_complete(word, k: int, cap: int = PERMUTATION_CAP) -> bool:
    """True iff every permutation of [k] is a subsequence of ``word``."""
    return missing_permutation(word, k, cap) is None


def missing_pattern(word, k: int, d: int | None = None, require_regular: bool = False):
    """First p.a. of length k over [d] without a (regular) occurrence, or None."""
    d = _alphabet(word, d)
    table = NextTable(word, d)
    find = find_regular_occurrence if require_regular else find_occurrence
    for pattern in enumerate_pa(k, d):
        if find(word, pattern, d, table) is None:
            return pattern
    return None


def is_superpattern(word, k: int, d: int | None = None, require_regular: bool = False,
                    direct: bool = False) -> bool:
    """True iff ``word`` contains every p.a. of length k over [d].

    When d == k the check goes through :func:`is_complete` (the three notions
    coincide there); ``direct=True`` forces the pattern-by-pattern check.
    """
    d = _alphabet(word, d)
    if d == k and not direct and k <= PERMUTATION_CAP:
        return is_complete(word, k)
    return missing_pattern(word, k, d, require_regular) is None


def is_surjective(word, d: int) -> bool:
    return set(_letters(word)) >= set(range(1, d + 1))


@dataclass(frozen=True)
class MatcherState:
    """Greedy match progress for every permutation of [k], in lexicographic order."""

    k: int
    frontier: tuple[int, ...]
    completed_count: int = 0

    @classmethod
    def start(cls, k: int, cap: int = 8) -> "MatcherState":
        if k < 1:
            raise PatternError("k must be positive")
        all_permutations(k, cap)
        return cls(k, (0,) * math.factorial(k), 0)

    @property
    def complete(self) -> bool:
        return self.completed_count == len(self.frontier)


def _perms_cached(k: int, _cache={}):
    if k not in _cache:
        _cache[k] = all_permutations(k)
    return _cache[k]


def matcher_feed(state: MatcherState, letter: int) -> MatcherState:
    """Feed one letter; returns the advanced state."""
    k = state.k
    if not 1 <= letter <= k:
        raise PatternError(f"letter {letter} outside 1..{k}")
    perms = _perms_cached(k)
    frontier = list(state.frontier)
    done = state.completed_count
    for i, f in enumerate(frontier):
        if f < k and perms[i][f] == letter:
            frontier[i] = f + 1
            if f + 1 == k:
                done += 1
    return MatcherState(k, tuple(frontier), done)
