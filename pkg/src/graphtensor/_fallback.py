"""Numpy implementations of the compiled kernels in ``_core``.

Same signatures and results; used when the extension is not built.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

_CHUNK = 1 << 20


def treewidth_dp(n: int, adj_masks: Sequence[int]) -> tuple[int, list[int]]:
    """Exact treewidth by DP over vertex subsets, vectorised by popcount layer."""
    if n == 0:
        return -1, []
    if n > 26:
        raise ValueError("numpy treewidth_dp supports at most 26 vertices")
    size = 1 << n
    subsets = np.arange(size, dtype=np.int64)
    adj = [int(a) for a in adj_masks]

    def neighbourhood(sets: np.ndarray) -> np.ndarray:
        out = np.zeros_like(sets)
        for u in range(n):
            out |= np.where((sets >> u) & 1, adj[u], 0)
        return out

    # elim[v][s]: elimination degree of v after the vertices of s (v not in s).
    elim = np.zeros((n, size), dtype=np.uint8)
    for v in range(n):
        bit = 1 << v
        reach = adj[v] & subsets
        while True:
            grown = reach | (neighbourhood(reach) & subsets)
            if np.array_equal(grown, reach):
                break
            reach = grown
        nb = adj[v] | neighbourhood(reach)
        elim[v] = np.bitwise_count(nb & ~subsets & ~bit)

    tw = np.full(size, 255, dtype=np.uint8)
    choice = np.zeros(size, dtype=np.uint8)
    tw[0] = 0
    popcount = np.bitwise_count(subsets)
    for k in range(1, n + 1):
        layer = subsets[popcount == k]
        best = np.full(layer.shape, 255, dtype=np.uint8)
        best_v = np.zeros(layer.shape, dtype=np.uint8)
        for v in range(n):
            has = ((layer >> v) & 1).astype(bool)
            prev = layer[has] ^ (1 << v)
            cand = np.maximum(tw[prev], elim[v][prev] + 1)
            cur = best[has]
            better = cand < cur
            idx = np.nonzero(has)[0][better]
            best[idx] = cand[better]
            best_v[idx] = v
        tw[layer] = best
        choice[layer] = best_v

    order = []
    rest = size - 1
    while rest:
        v = int(choice[rest])
        order.append(v)
        rest &= ~(1 << v)
    order.reverse()
    return int(tw[size - 1]) - 1, order


def holant_sum(n: int, num_edges: int, vertex_edges: Sequence[Sequence[int]],
               signatures: Sequence[Sequence[int]]) -> int:
    """Brute-force Holant sum in int64 chunks of the assignment space."""
    sigs = [np.asarray(s, dtype=np.int64) for s in signatures]
    total_assignments = n ** num_edges
    total = 0
    powers = np.array([n ** e for e in range(num_edges)], dtype=np.int64)
    for start in range(0, total_assignments, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total_assignments), dtype=np.int64)
        digits = [(codes // p) % n for p in powers]
        prod = np.ones(codes.shape, dtype=np.int64)
        for v, edges in enumerate(vertex_edges):
            local = np.zeros(codes.shape, dtype=np.int64)
            w = 1
            for e in edges:
                local += digits[e] * w
                w *= n
            prod *= sigs[v][local]
        total += int(prod.sum())
    return total
