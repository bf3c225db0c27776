"""The plain-Python kernel path must reproduce the compiled one exactly."""

import json
import os
import subprocess
import sys

from superpat import _jit
from superpat.search import SearchProblem, search_min
from superpat.stochastic import StreamConfig, simulate

SCRIPT = """
import json
from superpat import _jit
from superpat.search import SearchProblem, search_min
from superpat.stochastic import StreamConfig, simulate
res = search_min(SearchProblem(3, 4, surjective=True))
sim = simulate(StreamConfig(4, 2024, 300))
print(json.dumps({
    "jit": _jit.JIT_ENABLED,
    "search": [res.min_length, str(res.witness), res.nodes_visited, res.pruned],
    "Y": sim.Y.tolist(), "X": sim.X.tolist(), "Z": sim.Z.tolist(),
    "blocks": sim.blocks.tolist(),
}))
"""


def test_python_path_matches_compiled():
    env = dict(os.environ, SUPERPAT_DISABLE_JIT="1")
    proc = subprocess.run([sys.executable, "-W", "error::RuntimeWarning", "-c", SCRIPT],
                          env=env, capture_output=True, text=True, check=True)
    plain = json.loads(proc.stdout)
    assert plain["jit"] is False

    res = search_min(SearchProblem(3, 4, surjective=True))
    sim = simulate(StreamConfig(4, 2024, 300))
    assert plain["search"] == [res.min_length, str(res.witness), res.nodes_visited, res.pruned]
    assert plain["Y"] == sim.Y.tolist()
    assert plain["X"] == sim.X.tolist()
    assert plain["Z"] == sim.Z.tolist()
    assert plain["blocks"] == sim.blocks.tolist()


def test_backend_flag_in_this_process():
    assert _jit.backend_name() in ("numba", "python")
