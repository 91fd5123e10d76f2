# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: subset DP for treewidth and brute-force Holant sums."""

from libc.stdint cimport int64_t, uint8_t, uint32_t
from libc.stdlib cimport malloc, free

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef extern from *:
    int __builtin_popcount(unsigned int) nogil
    int __builtin_ctz(unsigned int) nogil


cdef inline int _elim_degree(uint32_t s, int v, const uint32_t* adj) nogil:
    """Number of vertices outside s + {v} reachable from v through s."""
    cdef uint32_t reach = adj[v] & s
    cdef uint32_t nb = adj[v]
    cdef uint32_t todo = reach
    cdef uint32_t new
    cdef int u
    while todo:
        u = __builtin_ctz(todo)
        todo &= todo - 1
        nb |= adj[u]
        new = adj[u] & s & ~reach
        reach |= new
        todo |= new
    return __builtin_popcount(nb & ~s & ~(<uint32_t>1 << v))


def treewidth_dp(int n, adj_masks):
    """Exact treewidth by DP over vertex subsets.

    Returns ``(width, order)`` where ``order`` is an optimal elimination order.
    ``adj_masks[v]`` is the neighbourhood bitmask of vertex ``v``.
    """
    if n == 0:
        return -1, []
    if n > 30:
        raise ValueError("treewidth_dp supports at most 30 vertices")
    cdef uint32_t* adj = <uint32_t*> malloc(n * sizeof(uint32_t))
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef cnp.ndarray[uint8_t, ndim=1] tw_arr = np.empty(size, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] choice_arr = np.zeros(size, dtype=np.uint8)
    cdef uint8_t* tw = <uint8_t*> tw_arr.data
    cdef uint8_t* choice = <uint8_t*> choice_arr.data
    cdef uint32_t s, rest, bits, prev
    cdef int v, best, best_v, cand, q
    for v in range(n):
        adj[v] = <uint32_t> adj_masks[v]
    # tw[s] stores (width of eliminating s first) + 1, so the empty set is 0.
    tw[0] = 0
    with nogil:
        for s in range(1, <uint32_t>size):
            best = 255
            best_v = 0
            bits = s
            while bits:
                v = __builtin_ctz(bits)
                bits &= bits - 1
                prev = s & ~(<uint32_t>1 << v)
                cand = tw[prev]
                if cand >= best:
                    continue
                q = _elim_degree(prev, v, adj) + 1
                if q > cand:
                    cand = q
                if cand < best:
                    best = cand
                    best_v = v
            tw[s] = <uint8_t> best
            choice[s] = <uint8_t> best_v
    free(adj)
    order = []
    rest = <uint32_t>(size - 1)
    while rest:
        v = choice[rest]
        order.append(v)
        rest &= ~(<uint32_t>1 << v)
    order.reverse()
    return int(tw[size - 1]) - 1, order


def holant_sum(int n, int num_edges, vertex_edges, signatures):
    """Sum over all f: E -> [n] of prod_v signatures[v][local index of f at v].

    ``vertex_edges[v]`` lists the incident edge positions in local-index order
    (position j carries weight n**j). Signatures are int64 arrays; the caller
    guarantees the total stays within int64.
    """
    cdef int nv = len(vertex_edges)
    cdef int v, j, e, k
    cdef Py_ssize_t total_deg = 0
    for v in range(nv):
        total_deg += len(vertex_edges[v])
    # For each edge: the list of (vertex, weight) pairs it contributes to.
    cdef int* edge_ptr = <int*> malloc((num_edges + 1) * sizeof(int))
    cdef int* edge_vtx = <int*> malloc((total_deg + 1) * sizeof(int))
    cdef int64_t* edge_w = <int64_t*> malloc((total_deg + 1) * sizeof(int64_t))
    cdef int64_t* sig_off = <int64_t*> malloc((nv + 1) * sizeof(int64_t))
    cdef int64_t* local = <int64_t*> malloc((nv + 1) * sizeof(int64_t))
    cdef int* digit = <int*> malloc((num_edges + 1) * sizeof(int))
    counts = [0] * num_edges
    for v in range(nv):
        for e in vertex_edges[v]:
            counts[e] += 1
    edge_ptr[0] = 0
    for e in range(num_edges):
        edge_ptr[e + 1] = edge_ptr[e] + counts[e]
    fill = [edge_ptr[e] for e in range(num_edges)]
    for v in range(nv):
        w = 1
        for e in vertex_edges[v]:
            edge_vtx[fill[e]] = v
            edge_w[fill[e]] = w
            fill[e] += 1
            w *= n
    flat = np.ascontiguousarray(np.concatenate([np.asarray(s, dtype=np.int64) for s in signatures])
                                if nv else np.zeros(0, dtype=np.int64))
    cdef cnp.ndarray[int64_t, ndim=1] flat_arr = flat
    cdef int64_t* sig = <int64_t*> flat_arr.data
    off = 0
    for v in range(nv):
        sig_off[v] = off
        off += len(signatures[v])
        local[v] = 0
    for e in range(num_edges):
        digit[e] = 0
    cdef int64_t total = 0
    cdef int64_t prod
    cdef bint done = False
    with nogil:
        while not done:
            prod = 1
            for v in range(nv):
                prod *= sig[sig_off[v] + local[v]]
                if prod == 0:
                    break
            total += prod
            # odometer step with incremental local-index updates
            e = 0
            while True:
                if e == num_edges:
                    done = True
                    break
                if digit[e] + 1 < n:
                    digit[e] += 1
                    for k in range(edge_ptr[e], edge_ptr[e + 1]):
                        local[edge_vtx[k]] += edge_w[k]
                    break
                for k in range(edge_ptr[e], edge_ptr[e + 1]):
                    local[edge_vtx[k]] -= (n - 1) * edge_w[k]
                digit[e] = 0
                e += 1
    free(edge_ptr)
    free(edge_vtx)
    free(edge_w)
    free(sig_off)
    free(local)
    free(digit)
    return int(total)
