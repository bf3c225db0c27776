"""
The random superpattern process.

Letters are drawn uniformly from [k] one at a time. On a single stream three
stopping times are tracked together:

* ``Y``: completion of the block word (each block is a coupon-collector run
  over the letters not yet retired; its completing letter is retired),
* ``X``: first time the stream is a complete word, i.e. a superpattern,
* ``Z``: end of the k-th full coupon round, i.e. first omnisequence.

``Y <= X <= Z`` holds on every stream.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from statistics import NormalDist
from typing import TextIO

import numpy as np

from . import _kernels
from .containment import MatcherState, matcher_feed
from .patterns import PatternError

X_TRACK_CAP = 7
EXACT_X_CAP = 3
CHUNK = 2048
EULER_GAMMA = 0.5772156649015329
GENERATOR = _kernels.GENERATOR


# ---------------------------------------------------------------------------
# seeds and tries
# ---------------------------------------------------------------------------


def derive_seeds(master_seed: int, start: int, count: int) -> np.ndarray:
    """Per-trial seeds: the splitmix64 sequence of ``master_seed`` at positions
    start+1 .. start+count."""
    master = np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF)
    idx = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = master + (idx + np.uint64(1)) * _kernels._GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _kernels._MIX1
        z = (z ^ (z >> np.uint64(27))) * _kernels._MIX2
        return z ^ (z >> np.uint64(31))


@lru_cache(maxsize=None)
def permutation_trie(k: int):
    """Prefix trie of all permutations of [k] as flat arrays.

    Returns (node_letter, node_depth, child_start, children); node 0 is the
    root and the children of node n are children[child_start[n]:child_start[n+1]].
    """
    letters, depths, kids = [0], [0], [[]]
    index = {(): 0}
    for p in permutations(range(1, k + 1)):
        for m in range(1, k + 1):
            key = p[:m]
            if key not in index:
                index[key] = len(letters)
                letters.append(p[m - 1])
                depths.append(m)
                kids.append([])
                kids[index[p[: m - 1]]].append(index[key])
    child_start = np.zeros(len(letters) + 1, dtype=np.int64)
    for n, ch in enumerate(kids):
        child_start[n + 1] = child_start[n] + len(ch)
    children = np.array([c for ch in kids for c in ch], dtype=np.int64)
    return (np.array(letters, dtype=np.int64), np.array(depths, dtype=np.int64),
            child_start, children)


def _run_chunk(k, seeds, track_x, out, lo, hi):
    trie = permutation_trie(k) if track_x else permutation_trie(1)
    with np.errstate(over="ignore"):
        _kernels.run_trials(k, seeds, track_x, *trie, out["Y"][lo:hi], out["X"][lo:hi],
                            out["Z"][lo:hi], out["blocks"][lo:hi], out["positions"][lo:hi])


# ---------------------------------------------------------------------------
# trials and summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    Y: int
    X: int | None
    Z: int
    blocks: tuple  # ((k_i, p_i), ...)


@dataclass(frozen=True)
class StreamConfig:
    k: int
    master_seed: int
    trials: int

    def __post_init__(self):
        if self.k < 1:
            raise PatternError("k must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass(frozen=True)
class SummaryStats:
    trials: int
    mean: float
    variance: float
    ci_half_width: float
    master_seed: int
    confidence: float = 0.99

    @classmethod
    def from_samples(cls, samples, master_seed, confidence=0.99):
        a = np.asarray(samples, dtype=np.float64)
        n = a.size
        mean = float(a.mean())
        var = float(a.var(ddof=1)) if n > 1 else 0.0
        z = NormalDist().inv_cdf(0.5 + confidence / 2)
        return cls(n, mean, var, z * math.sqrt(var / n), master_seed, confidence)

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.trials)


@dataclass
class Simulation:
    config: StreamConfig
    Y: np.ndarray
    X: np.ndarray | None
    Z: np.ndarray
    blocks: np.ndarray
    positions: np.ndarray
    seeds: np.ndarray
    confidence: float = 0.99
    generator: str = GENERATOR

    @property
    def stats(self) -> dict:
        out = {}
        for name in ("Y", "X", "Z"):
            arr = getattr(self, name)
            if arr is not None:
                out[name] = SummaryStats.from_samples(arr, self.config.master_seed, self.confidence)
        return out

    def record(self, i: int) -> TrialRecord:
        x = None if self.X is None else int(self.X[i])
        return TrialRecord(int(self.Y[i]), x, int(self.Z[i]),
                           tuple(zip(self.blocks[i].tolist(), self.positions[i].tolist())))


def run_trial(k: int, seed: int, track_x: bool | None = None) -> TrialRecord:
    """One stream from the given 64-bit seed (used directly, not derived)."""
    if k < 1:
        raise PatternError("k must be positive")
    if track_x is None:
        track_x = k <= X_TRACK_CAP
    out = _buffers(k, 1)
    seeds = np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    _run_chunk(k, seeds, track_x, out, 0, 1)
    x = int(out["X"][0]) if track_x else None
    return TrialRecord(int(out["Y"][0]), x, int(out["Z"][0]),
                       tuple(zip(out["blocks"][0].tolist(), out["positions"][0].tolist())))


def _buffers(k, n):
    return {
        "Y": np.zeros(n, dtype=np.int64),
        "X": np.zeros(n, dtype=np.int64),
        "Z": np.zeros(n, dtype=np.int64),
        "blocks": np.zeros((n, k), dtype=np.int64),
        "positions": np.zeros((n, k), dtype=np.int64),
    }


def draw_letters(seed: int, k: int, count: int) -> list[int]:
    """The first ``count`` letters of the stream a trial with this seed sees."""
    state = np.empty(4, dtype=np.uint64)
    with np.errstate(over="ignore"):
        _kernels.rng_init(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), state)
        return [int(_kernels.rng_below(state, k)) + 1 for _ in range(count)]


def stream_stopping_times(letters, k: int) -> TrialRecord:
    """Stopping times of an explicit letter stream, computed letter by letter
    with the permutation matcher. Times not reached are None."""
    alive = set(range(1, k + 1))
    needed = set(alive)
    blocks = []
    y = x = z = None
    seen, rounds = set(), 0
    matcher = MatcherState.start(k) if k <= X_TRACK_CAP else None
    for t, c in enumerate(letters, start=1):
        if y is None and c in needed:
            needed.discard(c)
            if not needed:
                blocks.append((c, t))
                alive.discard(c)
                needed = set(alive)
                if not alive:
                    y = t
        if z is None:
            seen.add(c)
            if len(seen) == k:
                rounds += 1
                seen = set()
                if rounds == k:
                    z = t
        if matcher is not None and x is None:
            matcher = matcher_feed(matcher, c)
            if matcher.complete:
                x = t
    return TrialRecord(y, x, z, tuple(blocks))


def simulate(config: StreamConfig, threads: int = 1, track_x: bool | None = None,
             confidence: float = 0.99) -> Simulation:
    """Run ``config.trials`` independent streams.

    Trial i always uses seed i of the master sequence and writes slot i of the
    result arrays, so the output does not depend on ``threads``.
    """
    if config.trials < 2:
        raise ValueError("simulate needs at least 2 trials")
    k, n = config.k, config.trials
    if track_x is None:
        track_x = k <= X_TRACK_CAP
    elif track_x and k > X_TRACK_CAP:
        raise PatternError(f"X tracking is capped at k <= {X_TRACK_CAP}")
    seeds = derive_seeds(config.master_seed, 0, n)
    out = _buffers(k, n)
    chunks = [(lo, min(lo + CHUNK, n)) for lo in range(0, n, CHUNK)]

    def work(span):
        lo, hi = span
        _run_chunk(k, seeds[lo:hi], track_x, out, lo, hi)

    if threads == 1:
        for span in chunks:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    return Simulation(config, out["Y"], out["X"] if track_x else None, out["Z"],
                      out["blocks"], out["positions"], seeds, confidence)


def write_trial_dump(sim: Simulation, fh: TextIO) -> None:
    """CSV, one row per trial: index, seed, Y, X, Z, k_1..k_k, p_1..p_k."""
    k = sim.config.k
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["trial", "seed", "Y", "X", "Z"]
               + [f"k_{i}" for i in range(1, k + 1)] + [f"p_{i}" for i in range(1, k + 1)])
    for i in range(sim.config.trials):
        x = "" if sim.X is None else int(sim.X[i])
        w.writerow([i, int(sim.seeds[i]), int(sim.Y[i]), x, int(sim.Z[i])]
                   + sim.blocks[i].tolist() + sim.positions[i].tolist())


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def harmonic(k: int, power: int = 1) -> Fraction:
    return sum((Fraction(1, j**power) for j in range(1, k + 1)), Fraction(0))


@dataclass(frozen=True)
class ClosedForms:
    k: int
    E_Y: Fraction
    Var_Y: Fraction
    E_Z: Fraction
    thm2_upper_leading: float
    thm3_lower_leading: float

    @property
    def var_ratio(self) -> float:
        """Var_Y / k^3, which tends to pi^2/6."""
        return float(self.Var_Y / self.k**3)


def closed_forms(k: int) -> ClosedForms:
    if k < 1:
        raise PatternError("k must be positive")
    h1, h2 = harmonic(k), harmonic(k, 2)
    e_y = k * (k + 1) * h1 - k * k
    sum_form = k * sum((Fraction(j, k - j + 1) for j in range(1, k + 1)), Fraction(0))
    if e_y != sum_form:
        raise AssertionError("expected block time disagrees with its sum form")
    var_y = (k**3 + k**2) * h2 - (2 * k**2 + k) * h1 + k**2
    log_k = math.log(k)
    return ClosedForms(
        k=k,
        E_Y=e_y,
        Var_Y=var_y,
        E_Z=k * k * h1,
        thm2_upper_leading=k * k * (log_k + EULER_GAMMA),
        thm3_lower_leading=k * k * (log_k + EULER_GAMMA - 1),
    )


# ---------------------------------------------------------------------------
# exact chains
# ---------------------------------------------------------------------------


def _absorption_time(start, step, done, k):
    """Expected steps to absorption for a chain that only moves forward.

    Every transition either stays put or moves to a strictly later state, so
    E[s] = (k + sum over moving letters of E[next]) / (number of moving letters).
    """
    memo = {}

    def value(s):
        if s in memo:
            return memo[s]
        if done(s):
            memo[s] = Fraction(0)
            return memo[s]
        moving = [t for t in (step(s, c) for c in range(1, k + 1)) if t != s]
        if not moving:
            raise AssertionError(f"state {s} can never be left")
        memo[s] = (k + sum(value(t) for t in moving)) / len(moving)
        return memo[s]

    return value(start), len(memo)


def x_chain(k: int):
    """(start, step, done) for the complete-word process; a state is the
    matched-prefix length of every permutation of [k]."""
    perms = list(permutations(range(1, k + 1)))

    def step(state, c):
        return tuple(f + 1 if f < k and perms[i][f] == c else f for i, f in enumerate(state))

    return (0,) * len(perms), step, lambda s: all(f == k for f in s)


def z_chain(k: int):
    full = (1 << k) - 1

    def step(state, c):
        rounds, seen = state
        seen |= 1 << (c - 1)
        if seen == full:
            return rounds + 1, 0
        return rounds, seen

    return (0, 0), step, lambda s: s[0] == k


def y_chain(k: int):
    full = (1 << k) - 1

    def step(state, c):
        alive, needed = state
        bit = 1 << (c - 1)
        if not needed & bit:
            return state
        needed &= ~bit
        if needed == 0:
            alive &= ~bit
            needed = alive
        return alive, needed

    return (full, full), step, lambda s: s[0] == 0


def exact_expectation(k: int, process: str = "X", max_k: int = EXACT_X_CAP) -> Fraction:
    """Exact expected stopping time from the absorbing chain, as a rational."""
    process = process.upper()
    if k < 1:
        raise PatternError("k must be positive")
    if process == "X":
        if k > max_k:
            raise PatternError(f"state space too large: X chain is capped at k <= {max_k}")
        chain = x_chain(k)
    elif process == "Z":
        if k > 20:
            raise PatternError("Z chain is capped at k <= 20")
        chain = z_chain(k)
    elif process == "Y":
        if k > 16:
            raise PatternError("Y chain is capped at k <= 16")
        chain = y_chain(k)
    else:
        raise ValueError(f"unknown process {process!r}")
    value, _ = _absorption_time(*chain, k)
    return value


# ---------------------------------------------------------------------------
# concentration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationReport:
    k: int
    omega: float
    trials: int
    lower: float
    upper: float
    inside: int

    @property
    def fraction(self) -> float:
        return self.inside / self.trials


def concentration_interval(k: int, omega: float) -> tuple[float, float]:
    """k^2 log k - (1 - gamma) k^2 - omega k^1.5 .. k^2 log k + gamma k^2 + omega k^1.5."""
    base = k * k * math.log(k)
    spread = omega * k**1.5
    return base - (1 - EULER_GAMMA) * k * k - spread, base + EULER_GAMMA * k * k + spread


def concentration_check(k: int, omega: float, trials: int, seed: int,
                        threads: int = 1) -> ConcentrationReport:
    if k < 2:
        raise PatternError("interval is degenerate for k < 2")
    if k > X_TRACK_CAP:
        raise PatternError(f"X tracking is capped at k <= {X_TRACK_CAP}")
    if omega <= 0:
        raise ValueError("omega must be positive")
    lo, hi = concentration_interval(k, omega)
    sim = simulate(StreamConfig(k, seed, trials), threads=threads)
    inside = int(np.count_nonzero((sim.X >= lo) & (sim.X <= hi)))
    return ConcentrationReport(k, omega, trials, lo, hi, inside)
