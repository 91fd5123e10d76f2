"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from graphtensor import _fallback, kernels
from graphtensor.graphs import clique, cycle, grid, line_graph
from graphtensor.tensors import GraphTensorIndexing
from graphtensor.treewidth import _index_adjacency

try:
    from graphtensor import _core
except ImportError:
    _core = None


def treewidth_cases():
    for name, g in (("L(K5)", line_graph(clique(5))), ("L(K6)", line_graph(clique(6))),
                    ("grid4x4", grid(4, 4))):
        verts, masks = _index_adjacency(g)
        yield name, (len(verts), masks)


def holant_cases():
    rng = random.Random(1)
    for name, g, n in (("K4,n=3", clique(4), 3), ("C8,n=4", cycle(8), 4), ("grid3x3,n=2", grid(3, 3), 2)):
        ix = GraphTensorIndexing.of(g, n)
        sigs = [[rng.randint(-3, 3) for _ in range(d)] for d in ix.dims]
        yield name, (n, g.num_edges, [list(x) for x in ix.incident], sigs)


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<12} {'case':<14} {'numpy s':>10} {'cython s':>10} {'speedup':>8}")
    for kernel, cases in (("treewidth_dp", treewidth_cases()), ("holant_sum", holant_cases())):
        for name, call in cases:
            slow = bench(getattr(_fallback, kernel), call, args.repeat)
            if _core is None:
                print(f"{kernel:<12} {name:<14} {slow:>10.4f} {'n/a':>10} {'':>8}")
                continue
            fast_fn = getattr(_core, kernel)
            assert fast_fn(*call) == getattr(_fallback, kernel)(*call)
            fast = bench(fast_fn, call, args.repeat)
            print(f"{kernel:<12} {name:<14} {slow:>10.4f} {fast:>10.4f} {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
