"""
Hot loops: the depth-first word search and the random-stream trial runner.

Every function here compiles under numba and also runs unchanged as plain
Python when the JIT is disabled (see ``_jit``). Unsigned arithmetic is kept
in ``np.uint64`` on both paths so the random streams are bit-identical.
Callers on the plain-Python path must silence numpy overflow warnings.
"""

import numpy as np

from ._jit import njit

GENERATOR = "xoshiro256** seeded by splitmix64, v1"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK32 = np.uint64(0xFFFFFFFF)
_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U5 = np.uint64(5)
_U7 = np.uint64(7)
_U9 = np.uint64(9)
_U11 = np.uint64(11)
_U17 = np.uint64(17)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_U32 = np.uint64(32)
_U45 = np.uint64(45)
_U57 = np.uint64(57)
_U64 = np.uint64(64)

SEARCH_FOUND = 1
SEARCH_EXHAUSTED = 0
SEARCH_BUDGET = -1
SEARCH_CANCELLED = -2


# ---------------------------------------------------------------------------
# random numbers
# ---------------------------------------------------------------------------


@njit(cache=True)
def splitmix64_mix(z):
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> _U31)


@njit(cache=True)
def trial_seed(master, index):
    """The (index+1)-th splitmix64 output of a generator seeded with ``master``."""
    return splitmix64_mix(master + (index + _U1) * _GOLDEN)


@njit(cache=True)
def _rotl(x, r):
    return (x << r) | (x >> (_U64 - r))


@njit(cache=True)
def rng_init(seed, state):
    z = seed
    for i in range(4):
        z = z + _GOLDEN
        state[i] = splitmix64_mix(z)


@njit(cache=True)
def rng_next(s):
    result = _rotl(s[1] * _U5, _U7) * _U9
    t = s[1] << _U17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], _U45)
    return result


@njit(cache=True)
def rng_below(s, n):
    """Unbiased integer in [0, n) for n < 2**32 (multiply-shift with rejection)."""
    bound = np.uint64(n)
    m = (rng_next(s) >> _U32) * bound
    low = m & _MASK32
    if low < bound:
        threshold = ((_MASK32 + _U1) - bound) % bound
        while low < threshold:
            m = (rng_next(s) >> _U32) * bound
            low = m & _MASK32
    return np.int64(m >> _U32)


# ---------------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def dfs_search(targets, class_start, k, d, length, prefix, symmetry, surjective,
               budget, spent, stop, branch, witness, counters):
    """Depth-first search for a word of ``length`` over [d] that fully matches
    at least one target in every class.

    ``targets`` is (T, k) int64 with rows grouped by class; class c owns rows
    class_start[c]:class_start[c+1]. Letters are tried in increasing order so
    the first witness found is the lexicographically smallest extension of
    ``prefix``. With ``symmetry`` each new letter may exceed the largest used
    so far by at most one.

    Shared arrays: ``spent[0]`` accumulates node counts across workers,
    ``stop[b] = 1`` marks branch b as having found a witness; a worker quits
    once any earlier branch has. Reads of both may be stale.

    ``counters`` receives (nodes, pruned). Returns a SEARCH_* status.
    """
    n_targets = targets.shape[0]
    n_classes = class_start.shape[0] - 1
    frontier = np.zeros((length + 1, n_targets), dtype=np.int64)
    maxletter = np.zeros(length + 1, dtype=np.int64)
    used = np.zeros(length + 1, dtype=np.int64)
    nxt = np.zeros(length + 1, dtype=np.int64)
    word = np.zeros(length, dtype=np.int64)
    nodes = 0
    pruned = 0
    flushed = 0
    base = prefix.shape[0]

    if base > length:
        counters[0] = 0
        counters[1] = 0
        return SEARCH_EXHAUSTED

    # replay the fixed prefix
    for depth in range(base):
        c = prefix[depth]
        for t in range(n_targets):
            f = frontier[depth, t]
            if f < k and targets[t, f] == c:
                frontier[depth + 1, t] = f + 1
            else:
                frontier[depth + 1, t] = f
        word[depth] = c
        maxletter[depth + 1] = max(maxletter[depth], c)
        used[depth + 1] = used[depth] | (1 << (c - 1))

    remaining = length - base
    worst = 0
    for cls in range(n_classes):
        best = 0
        for t in range(class_start[cls], class_start[cls + 1]):
            if frontier[base, t] > best:
                best = frontier[base, t]
        if k - best > worst:
            worst = k - best
    missing = 0
    if surjective:
        for c in range(d):
            if (used[base] >> c) & 1 == 0:
                missing += 1
    if worst > remaining or missing > remaining:
        counters[0] = 0
        counters[1] = 1
        return SEARCH_EXHAUSTED
    if base == length:
        counters[0] = 0
        counters[1] = 0
        for i in range(length):
            witness[i] = word[i]
        return SEARCH_FOUND

    depth = base
    nxt[depth] = 0
    status = SEARCH_EXHAUSTED
    while depth >= base:
        c = nxt[depth] + 1
        nxt[depth] = c
        limit = d
        if symmetry and maxletter[depth] + 1 < limit:
            limit = maxletter[depth] + 1
        if c > limit:
            depth -= 1
            continue

        nodes += 1
        if nodes - flushed >= 4096:
            spent[0] += nodes - flushed
            flushed = nodes
            if spent[0] > budget:
                status = SEARCH_BUDGET
                break
            cancelled = False
            for b in range(branch):
                if stop[b] != 0:
                    cancelled = True
            if cancelled:
                status = SEARCH_CANCELLED
                break

        for t in range(n_targets):
            f = frontier[depth, t]
            if f < k and targets[t, f] == c:
                frontier[depth + 1, t] = f + 1
            else:
                frontier[depth + 1, t] = f
        remaining = length - depth - 1
        worst = 0
        for cls in range(n_classes):
            best = 0
            for t in range(class_start[cls], class_start[cls + 1]):
                if frontier[depth + 1, t] > best:
                    best = frontier[depth + 1, t]
            if k - best > worst:
                worst = k - best
                if worst > remaining:
                    break
        if worst > remaining:
            pruned += 1
            continue
        mask = used[depth] | (1 << (c - 1))
        if surjective:
            missing = 0
            for x in range(d):
                if (mask >> x) & 1 == 0:
                    missing += 1
            if missing > remaining:
                pruned += 1
                continue

        word[depth] = c
        if depth + 1 == length:
            for i in range(length):
                witness[i] = word[i]
            status = SEARCH_FOUND
            stop[branch] = 1
            break
        maxletter[depth + 1] = max(maxletter[depth], c)
        used[depth + 1] = mask
        depth += 1
        nxt[depth] = 0

    spent[0] += nodes - flushed
    counters[0] = nodes
    counters[1] = pruned
    return status


# ---------------------------------------------------------------------------
# random superpattern process
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def run_trials(k, seeds, track_x, node_letter, node_depth, child_start, children,
               out_y, out_x, out_z, out_blocks, out_pos):
    """Run one letter stream per seed and record the three stopping times.

    Y: block rule -- block i completes once every letter not yet retired has
    appeared after the end of block i-1; the completing letter is retired.
    X: first time every permutation of [k] is a subsequence, tracked with a
    prefix trie of the permutations (node 0 is the root).
    Z: end of the k-th complete coupon-collector round.
    X is written as -1 when ``track_x`` is false.
    """
    full = (1 << k) - 1
    n_nodes = node_letter.shape[0]
    head = np.empty(k + 1, dtype=np.int64)
    link = np.empty(n_nodes, dtype=np.int64)
    n_leaves = 1
    for i in range(2, k + 1):
        n_leaves *= i
    state = np.empty(4, dtype=np.uint64)

    for trial in range(seeds.shape[0]):
        rng_init(seeds[trial], state)

        needed = full
        alive = full
        block = 0
        y_done = False

        seen = 0
        rounds = 0
        z_done = False

        x_done = not track_x
        leaves = 0
        if track_x:
            for c in range(k + 1):
                head[c] = -1
            for e in range(child_start[0], child_start[1]):
                node = children[e]
                link[node] = head[node_letter[node]]
                head[node_letter[node]] = node
        else:
            out_x[trial] = -1

        t = 0
        while not (y_done and x_done and z_done):
            c = rng_below(state, k) + 1
            t += 1
            bit = 1 << (c - 1)

            if not y_done and needed & bit:
                needed &= ~bit
                if needed == 0:
                    out_blocks[trial, block] = c
                    out_pos[trial, block] = t
                    block += 1
                    alive &= ~bit
                    needed = alive
                    if block == k:
                        out_y[trial] = t
                        y_done = True

            if not z_done:
                seen |= bit
                if seen == full:
                    rounds += 1
                    seen = 0
                    if rounds == k:
                        out_z[trial] = t
                        z_done = True

            if not x_done:
                node = head[c]
                head[c] = -1
                while node != -1:
                    after = link[node]
                    if node_depth[node] == k:
                        leaves += 1
                    else:
                        for e in range(child_start[node], child_start[node + 1]):
                            child = children[e]
                            link[child] = head[node_letter[child]]
                            head[node_letter[child]] = child
                    node = after
                if leaves == n_leaves:
                    out_x[trial] = t
                    x_done = True
