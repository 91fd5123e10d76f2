import random
import subprocess
import sys

import pytest

from graphtensor import _fallback, kernels
from graphtensor.graphs import clique, cycle, grid, line_graph
from graphtensor.tensors import GraphTensorIndexing
from graphtensor.treewidth import _index_adjacency

core = pytest.importorskip("graphtensor._core")


@pytest.mark.parametrize("g", [line_graph(clique(5)), grid(3, 4), cycle(7)])
def test_treewidth_backends_agree(g):
    verts, masks = _index_adjacency(g)
    assert core.treewidth_dp(len(verts), masks)[0] == _fallback.treewidth_dp(len(verts), masks)[0]


@pytest.mark.parametrize("g, n", [(clique(4), 2), (cycle(6), 3), (grid(2, 3), 2)])
def test_holant_backends_agree(g, n):
    rng = random.Random(0)
    ix = GraphTensorIndexing.of(g, n)
    sigs = [[rng.randint(-3, 3) for _ in range(d)] for d in ix.dims]
    args = (n, g.num_edges, [list(x) for x in ix.incident], sigs)
    assert core.holant_sum(*args) == _fallback.holant_sum(*args)


def test_compiled_backend_selected():
    assert kernels.BACKEND == "cython"


def test_pure_env_forces_fallback():
    out = subprocess.run([sys.executable, "-c", "from graphtensor import kernels; print(kernels.BACKEND)"],
                         env={"GRAPHTENSOR_PURE": "1", "PATH": ""} | _pythonpath(),
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def _pythonpath():
    import os
    return {k: v for k, v in os.environ.items() if k == "PYTHONPATH"}
