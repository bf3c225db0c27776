#!/usr/bin/env python3
"""
Compiled vs plain-Python kernels.

Each workload runs in a fresh interpreter, once with numba and once with
SUPERPAT_DISABLE_JIT=1, and the two outputs are compared for equality.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --repeat 3 --trials 2000
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from superpat import _jit
from superpat.search import SearchProblem, search_min
from superpat.stochastic import StreamConfig, simulate

name, trials = sys.argv[1], int(sys.argv[2])
# first call pays for compilation (or loads the on-disk cache)
t0 = time.perf_counter()
if name.startswith("search"):
    k, d, surj = {"search-n44": (4, 4, False), "search-nu36": (3, 6, True)}[name]
    search_min(SearchProblem(2, 2))
    warm = time.perf_counter() - t0
    t0 = time.perf_counter()
    res = search_min(SearchProblem(k, d, surj))
    out = [res.min_length, str(res.witness), res.nodes_visited]
else:
    k = int(name.split("-k")[1])
    simulate(StreamConfig(k, 0, 2))
    warm = time.perf_counter() - t0
    t0 = time.perf_counter()
    sim = simulate(StreamConfig(k, 42, trials))
    out = [sim.Y.tolist(), sim.X.tolist(), sim.Z.tolist()]
elapsed = time.perf_counter() - t0
print(json.dumps({"backend": _jit.backend_name(), "warm": warm, "elapsed": elapsed, "out": out}))
"""

WORKLOADS = ["search-n44", "search-nu36", "simulate-k3", "simulate-k5"]


def run(name, trials, disable_jit):
    env = dict(os.environ)
    if disable_jit:
        env["SUPERPAT_DISABLE_JIT"] = "1"
    else:
        env.pop("SUPERPAT_DISABLE_JIT", None)
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, name, str(trials)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--trials", type=int, default=1000, help="trials per simulate workload")
    parser.add_argument("--repeat", type=int, default=1)
    parser.add_argument("--only", choices=WORKLOADS, action="append")
    args = parser.parse_args()

    print(f"{'workload':<14}{'numba s':>10}{'python s':>10}{'speedup':>10}{'compile s':>11}  same")
    for name in args.only or WORKLOADS:
        fast = [run(name, args.trials, False) for _ in range(args.repeat)]
        slow = [run(name, args.trials, True) for _ in range(args.repeat)]
        t_fast = min(r["elapsed"] for r in fast)
        t_slow = min(r["elapsed"] for r in slow)
        same = all(r["out"] == fast[0]["out"] for r in fast + slow)
        print(f"{name:<14}{t_fast:>10.3f}{t_slow:>10.3f}{t_slow / t_fast:>10.1f}"
              f"{fast[0]['warm']:>11.2f}  {same}")


if __name__ == "__main__":
    main()
