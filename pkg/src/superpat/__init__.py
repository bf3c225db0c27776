"""Superpatterns for preferential arrangements: enumeration, containment,
shortest-superpattern search and the random superpattern process."""

__version__ = "0.1.0"

from .patterns import (  # noqa: E402
    BoundsReport,
    PatternError,
    PrefArrangement,
    Word,
    bounds_report,
    canonicalize,
    count_pa,
    enumerate_pa,
    fubini,
)
from .containment import (  # noqa: E402
    MatcherState,
    Occurrence,
    contains_subsequence,
    find_occurrence,
    is_complete,
    is_regular_occurrence,
    is_superpattern,
    matcher_feed,
)

__all__ = [
    "BoundsReport",
    "MatcherState",
    "Occurrence",
    "PatternError",
    "PrefArrangement",
    "Word",
    "bounds_report",
    "canonicalize",
    "contains_subsequence",
    "count_pa",
    "enumerate_pa",
    "find_occurrence",
    "fubini",
    "is_complete",
    "is_regular_occurrence",
    "is_superpattern",
    "matcher_feed",
]
