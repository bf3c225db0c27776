"""
Words, preferential arrangements and the counting/bound formulas around them.

A preferential arrangement (p.a.) of length k is a word up to order
isomorphism; it is stored in dense-rank form, i.e. using exactly the values
1..j where j is the number of distinct letters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence


class PatternError(ValueError):
    pass


def encode(letters: Sequence[int], d: int | None = None) -> str:
    """Text form: contiguous digits when the alphabet fits in 1..9, commas otherwise."""
    if d is None:
        d = max(letters, default=0)
    if d <= 9:
        return "".join(str(x) for x in letters)
    return ",".join(str(x) for x in letters)


def decode(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
    else:
        parts = list(text)
    try:
        letters = tuple(int(p) for p in parts)
    except ValueError:
        raise PatternError(f"malformed word {text!r}") from None
    if any(x < 1 for x in letters):
        raise PatternError(f"malformed word {text!r}: letters must be positive")
    return letters


@dataclass(frozen=True)
class Word:
    """A finite word over the alphabet {1..d}."""

    letters: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if self.d < 1:
            raise PatternError("alphabet size must be positive")
        for x in self.letters:
            if not 1 <= x <= self.d:
                raise PatternError(f"letter {x} outside alphabet 1..{self.d}")

    @classmethod
    def parse(cls, text: str, d: int | None = None) -> "Word":
        letters = decode(text)
        if d is None:
            d = max(letters, default=1)
        return cls(letters, d)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self):
        return encode(self.letters, self.d)


class PrefArrangement(tuple):
    """A pattern in dense-rank form; construct through :func:`canonicalize`."""

    @property
    def k(self) -> int:
        return len(self)

    @property
    def j(self) -> int:
        return max(self, default=0)

    def __str__(self):
        return encode(self)

    def __repr__(self):
        return f"PrefArrangement({encode(self)!r})"


def canonicalize(word: Iterable[int]) -> PrefArrangement:
    """Dense-rank image of ``word``: each letter is replaced by its rank among
    the distinct letters present.

    >>> str(canonicalize([3, 3, 4]))
    '112'
    """
    letters = tuple(word)
    if not letters:
        raise PatternError("empty pattern")
    rank = {v: r for r, v in enumerate(sorted(set(letters)), start=1)}
    return PrefArrangement(rank[x] for x in letters)


def as_pattern(pattern: Iterable[int] | str) -> PrefArrangement:
    if isinstance(pattern, str):
        pattern = decode(pattern)
    return canonicalize(pattern)


def enumerate_pa(k: int, d: int) -> list[PrefArrangement]:
    """All p.a.'s of length k using at most min(k, d) distinct values, in
    lexicographic order."""
    if k < 1 or d < 1:
        raise PatternError("need k >= 1 and d >= 1")
    return list(_enumerate_cached(k, min(k, d)))


@lru_cache(maxsize=None)
def _enumerate_cached(k: int, top: int) -> tuple[PrefArrangement, ...]:
    out = []
    # restricted growth is not enough here (order matters both ways), so
    # filter the top^k words to those whose value set is an initial segment
    for w in product(range(1, top + 1), repeat=k):
        used = set(w)
        if len(used) == max(w):
            out.append(PrefArrangement(w))
    return tuple(out)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k)."""
    return _stirling2(n, k)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def count_pa(k: int, d: int) -> int:
    """Number of p.a.'s of length k over [d]: sum of j! S(k, j) for j <= min(k, d)."""
    return sum(math.factorial(j) * stirling2(k, j) for j in range(1, min(k, d) + 1))


def fubini(k: int, max_value: int | None = None) -> int:
    """Ordered Bell number a(k) = sum_{j=1..k} C(k, j) a(k - j), a(0) = 1.

    Python integers never wrap; ``max_value`` turns growth past a caller's
    fixed-width limit into an :class:`OverflowError` instead of a silent
    truncation downstream.
    """
    if k < 0:
        raise PatternError("k must be non-negative")
    a = [1]
    for n in range(1, k + 1):
        a.append(sum(math.comb(n, j) * a[n - j] for j in range(1, n + 1)))
        if max_value is not None and a[-1] > max_value:
            raise OverflowError(f"fubini({n}) = {a[-1]} exceeds {max_value}")
    return a[k]


@dataclass(frozen=True)
class BoundsReport:
    k: int
    prop1_lower: int
    newey_conjecture: int
    rado_upper: int
    burstein_upper: int


def prop1_lower(k: int) -> int:
    """Lower bound k^2/2 + 3k/2 - 2 on the shortest complete word over [k]."""
    return k * (k + 3) // 2 - 2


def rado_upper(k: int) -> int:
    """ceil(k^2 - 7k/3 + 19/3), in exact integer arithmetic."""
    return -(-(3 * k * k - 7 * k + 19) // 3)


def burstein_upper(k: int) -> int:
    return k * k - 2 * k + 4


def newey_conjecture(k: int) -> int:
    """Conjectured n(k,k): k^2 - m k + sum_{i=1..m} i 2^(m-i) for 2^m <= k < 2^(m+1)."""
    if k < 1:
        raise PatternError("k must be positive")
    if k == 1:
        return k * k
    if k <= 3:
        return k * k - k + 1
    m = k.bit_length() - 1
    return k * k - m * k + sum(i * 2 ** (m - i) for i in range(1, m + 1))


def bounds_report(k: int) -> BoundsReport:
    if k < 2:
        raise PatternError("bounds are stated for k >= 2")
    return BoundsReport(
        k=k,
        prop1_lower=prop1_lower(k),
        newey_conjecture=newey_conjecture(k),
        rado_upper=rado_upper(k),
        burstein_upper=burstein_upper(k),
    )
