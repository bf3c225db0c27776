"""
Exhaustive search for shortest superpatterns.

Iterative deepening over the target length. Each length is split into
top-level branches by the first one or two letters; every branch is an
independent depth-first search in ``_kernels.dfs_search`` and can run on its
own thread. A length is refuted only when every branch exhausts its subtree.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np

from . import __version__
from . import _kernels
from ._jit import backend_name
from .containment import is_superpattern, is_surjective
from .patterns import PatternError, Word, encode, enumerate_pa, prop1_lower

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    def __init__(self, message, refuted=()):
        super().__init__(message)
        self.refuted = list(refuted)


class WitnessFound(Exception):
    def __init__(self, word):
        super().__init__(f"length {len(word)} admits the witness {word}")
        self.word = word


@dataclass(frozen=True)
class SearchProblem:
    k: int
    d: int
    surjective: bool = False
    max_len: int | None = None
    thread_count: int = 1
    symmetry: bool | None = None  # None: on exactly when d == k
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.k < 1 or self.d < 1:
            raise PatternError("need k >= 1 and d >= 1")
        if self.thread_count < 1:
            raise ValueError("thread_count must be positive")
        if self.symmetry and self.d != self.k:
            raise ValueError("symmetry reduction is only valid for d == k")
        if self.max_len is not None and self.d == self.k and self.k >= 2:
            if self.max_len < prop1_lower(self.k):
                raise ValueError(f"max_len {self.max_len} is below the lower bound {prop1_lower(self.k)}")

    @property
    def use_symmetry(self) -> bool:
        return self.d == self.k if self.symmetry is None else self.symmetry

    def lower_bound(self) -> int:
        if self.d == self.k:
            return prop1_lower(self.k) if self.k >= 2 else 1
        if self.surjective:
            return max(self.k, self.d)
        return self.k


@dataclass
class Certificate:
    """Record that no word of ``length`` over [d] satisfies the predicate."""

    k: int
    d: int
    length: int
    surjective: bool
    symmetry: bool
    targets: str
    branches: list  # (prefix, nodes, pruned)
    config_hash: str
    code_version: str = __version__

    @property
    def nodes(self) -> int:
        return sum(b[1] for b in self.branches)

    @property
    def pruned(self) -> int:
        return sum(b[2] for b in self.branches)

    def to_text(self) -> str:
        lines = [
            "kind: refutation",
            f"k: {self.k}",
            f"d: {self.d}",
            f"length: {self.length}",
            f"surjective: {str(self.surjective).lower()}",
            f"symmetry: {str(self.symmetry).lower()}",
            f"targets: {self.targets}",
            f"config_hash: {self.config_hash}",
            f"code_version: {self.code_version}",
            f"nodes: {self.nodes}",
            f"pruned: {self.pruned}",
        ]
        for prefix, nodes, pruned in self.branches:
            lines.append(f"branch.{prefix or '-'}: nodes={nodes} pruned={pruned}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        fields, branches = {}, []
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, value = line.partition(":")
            value = value.strip()
            if key.startswith("branch."):
                prefix = key[len("branch."):]
                parts = dict(p.split("=") for p in value.split())
                branches.append((
                    "" if prefix == "-" else prefix, int(parts["nodes"]), int(parts["pruned"])))
            else:
                fields[key.strip()] = value
        return cls(
            k=int(fields["k"]),
            d=int(fields["d"]),
            length=int(fields["length"]),
            surjective=fields["surjective"] == "true",
            symmetry=fields["symmetry"] == "true",
            targets=fields["targets"],
            branches=branches,
            config_hash=fields["config_hash"],
            code_version=fields["code_version"],
        )


@dataclass
class SearchResult:
    min_length: int | None
    witness: Word | None
    exhaustive: bool
    nodes_visited: int
    pruned: int
    wall_time: float
    refuted: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    witness_branch: str | None = None
    budget_exceeded: bool = False


def build_targets(k: int, d: int, permutations_only: bool | None = None):
    """Target words grouped by class; a class is satisfied when any of its
    targets is a subsequence.

    For d == k the permutations of [k] suffice (one class each); otherwise
    every p.a. contributes one class holding all its increasing images in [d].
    """
    if permutations_only is None:
        permutations_only = d == k
    rows, starts = [], [0]
    if permutations_only:
        if d != k:
            raise ValueError("permutation targets need d == k")
        for p in permutations(range(1, k + 1)):
            rows.append(p)
            starts.append(len(rows))
        kind = "permutations"
    else:
        for pattern in enumerate_pa(k, d):
            for letters in combinations(range(1, d + 1), pattern.j):
                rows.append(tuple(letters[v - 1] for v in pattern))
            starts.append(len(rows))
        kind = "patterns"
    targets = np.array(rows, dtype=np.int64).reshape(len(rows), k)
    return targets, np.array(starts, dtype=np.int64), kind


def branch_prefixes(d: int, length: int, symmetry: bool) -> list[tuple[int, ...]]:
    depth = min(2, length)
    out = []
    for prefix in product(range(1, d + 1), repeat=depth):
        if symmetry:
            top = 0
            ok = True
            for c in prefix:
                if c > top + 1:
                    ok = False
                    break
                top = max(top, c)
            if not ok:
                continue
        out.append(prefix)
    return out


def config_hash(k, d, length, surjective, symmetry, kind) -> str:
    blob = json.dumps(
        {"k": k, "d": d, "length": length, "surjective": surjective,
         "symmetry": symmetry, "targets": kind},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def estimate_nodes(d: int, length: int, symmetry: bool) -> int:
    """Crude unpruned size of the search tree at one length."""
    total = sum(d**i for i in range(1, length + 1))
    if symmetry:
        total //= max(1, _factorial(d))
    return max(total, 1)


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _search_length(problem: SearchProblem, length: int, targets, starts, spent):
    """Run every branch at one length. Returns (status, witness, branch, stats)."""
    symmetry = problem.use_symmetry
    prefixes = branch_prefixes(problem.d, length, symmetry)
    stop = np.zeros(len(prefixes), dtype=np.int64)

    def work(b):
        witness = np.zeros(max(length, 1), dtype=np.int64)
        counters = np.zeros(2, dtype=np.int64)
        with np.errstate(over="ignore"):
            status = _kernels.dfs_search(
                targets, starts, problem.k, problem.d, length,
                np.array(prefixes[b], dtype=np.int64), symmetry, problem.surjective,
                problem.budget, spent, stop, b, witness, counters)
        return int(status), witness[:length].copy(), int(counters[0]), int(counters[1])

    if problem.thread_count == 1:
        results = []
        for b in range(len(prefixes)):
            results.append(work(b))
            if results[-1][0] in (_kernels.SEARCH_FOUND, _kernels.SEARCH_BUDGET):
                break
    else:
        with ThreadPoolExecutor(max_workers=problem.thread_count) as pool:
            results = list(pool.map(work, range(len(prefixes))))

    stats = []
    for b, (status, witness, nodes, pruned) in enumerate(results):
        stats.append((encode(prefixes[b], problem.d), nodes, pruned))
        if status == _kernels.SEARCH_FOUND:
            # earliest successful branch wins: its witness is lexicographically first
            return status, Word(tuple(int(x) for x in witness), problem.d), stats[-1][0], stats
        if status == _kernels.SEARCH_BUDGET:
            return status, None, None, stats
    return _kernels.SEARCH_EXHAUSTED, None, None, stats


def _certificate(problem, length, kind, stats) -> Certificate:
    return Certificate(
        k=problem.k,
        d=problem.d,
        length=length,
        surjective=problem.surjective,
        symmetry=problem.use_symmetry,
        targets=kind,
        branches=stats,
        config_hash=config_hash(problem.k, problem.d, length, problem.surjective,
                                problem.use_symmetry, kind),
    )


def refute_length(k: int, d: int, length: int, surjective: bool = False, *,
                  symmetry: bool | None = None, budget: int = DEFAULT_BUDGET,
                  thread_count: int = 1, permutations_only: bool | None = None) -> Certificate:
    """Certify that no word of ``length`` over [d] is a (surjective) superpattern.

    Raises :class:`WitnessFound` when one exists and :class:`BudgetExceeded`
    when the node budget runs out first.
    """
    problem = SearchProblem(k, d, surjective, thread_count=thread_count,
                            symmetry=symmetry, budget=budget)
    targets, starts, kind = build_targets(k, d, permutations_only)
    spent = np.zeros(1, dtype=np.int64)
    status, witness, _, stats = _search_length(problem, length, targets, starts, spent)
    if status == _kernels.SEARCH_FOUND:
        raise WitnessFound(witness)
    if status == _kernels.SEARCH_BUDGET:
        raise BudgetExceeded(f"node budget {budget} exceeded at length {length}")
    return _certificate(problem, length, kind, stats)


def search_min(problem: SearchProblem, permutations_only: bool | None = None) -> SearchResult:
    """Shortest length admitting a witness, found by iterative deepening.

    Deepening starts at the problem's lower bound. The length just below the
    answer is always refuted by an explicit run (which, by padding, rules out
    every shorter length), so ``exhaustive`` never rests on a bound alone.
    """
    t0 = time.perf_counter()
    targets, starts, kind = build_targets(problem.k, problem.d, permutations_only)
    start = problem.lower_bound()
    est = estimate_nodes(problem.d, problem.max_len or start, problem.use_symmetry)
    log.info("search k=%d d=%d surjective=%s from length %d; unpruned tree ~%d nodes, "
             "budget %d, backend %s", problem.k, problem.d, problem.surjective, start, est,
             problem.budget, backend_name())

    spent = np.zeros(1, dtype=np.int64)
    refuted, certs = [], []
    nodes = pruned = 0

    def partial(exceeded):
        return SearchResult(None, None, False, nodes, pruned, time.perf_counter() - t0,
                            refuted, certs, budget_exceeded=exceeded)

    length = start
    while problem.max_len is None or length <= problem.max_len:
        status, witness, branch, stats = _search_length(problem, length, targets, starts, spent)
        nodes += sum(s[1] for s in stats)
        pruned += sum(s[2] for s in stats)
        if status == _kernels.SEARCH_BUDGET:
            log.warning("budget exhausted at length %d", length)
            return partial(True)
        if status == _kernels.SEARCH_FOUND:
            if length - 1 not in refuted:
                below = length - 1
                st, _, _, below_stats = _search_length(problem, below, targets, starts, spent)
                nodes += sum(s[1] for s in below_stats)
                pruned += sum(s[2] for s in below_stats)
                if st == _kernels.SEARCH_BUDGET:
                    return SearchResult(length, witness, False, nodes, pruned,
                                        time.perf_counter() - t0, refuted, certs, branch, True)
                if st == _kernels.SEARCH_FOUND:
                    raise AssertionError(f"lower bound {start} violated at length {below}")
                refuted.append(below)
                certs.append(_certificate(problem, below, kind, below_stats))
            return SearchResult(length, witness, True, nodes, pruned,
                                time.perf_counter() - t0, sorted(refuted), certs, branch)
        refuted.append(length)
        certs.append(_certificate(problem, length, kind, stats))
        length += 1
    return partial(False)


def verify_witness(word, problem: SearchProblem) -> bool:
    """Recheck a witness with the containment predicates only."""
    if not isinstance(word, Word):
        word = Word(tuple(word), problem.d)
    if any(x > problem.d for x in word):
        return False
    if problem.surjective and not is_surjective(word, problem.d):
        return False
    return is_superpattern(word, problem.k, problem.d)
