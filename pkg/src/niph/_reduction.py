"""Numba kernel: GF(2) reduction of the triangle boundary matrix.

Columns are bitsets over edge filtration ranks.  Triangles arrive in
filtration order; each nonzero reduced column pairs its pivot edge (the
birth of a 1-cycle) with the triangle (its death).  Reducing only the
triangle columns suffices for 1-dimensional pairs: vertex/edge pairing is
handled by the spanning-tree route.
"""

import numpy as np
from numba import njit

_ZERO = np.uint64(0)
_ONE = np.uint64(1)


@njit(cache=True)
def _top_bit(col):
    for w in range(col.shape[0] - 1, -1, -1):
        v = col[w]
        if v != _ZERO:
            h = 0
            while v > _ONE:
                v >>= _ONE
                h += 1
            return w * 64 + h
    return -1


@njit(cache=True)
def reduce_triangle_columns(tri_edge_ranks, n_edges):
    """Return pair_edge[t] = pivot edge rank of triangle t, or -1 if the
    column reduced to zero.

    Only reduced columns that own a pivot are kept (at most one per edge),
    so memory scales with the number of pairs, not the number of triangles.
    """
    n_tri = tri_edge_ranks.shape[0]
    n_words = (n_edges + 63) // 64
    cap = min(n_edges, n_tri)
    store = np.zeros((cap, n_words), dtype=np.uint64)
    owner = np.full(n_edges, -1, dtype=np.int64)  # pivot edge -> store row
    n_stored = 0
    acc = np.zeros(n_words, dtype=np.uint64)
    pair_edge = np.full(n_tri, -1, dtype=np.int64)
    for t in range(n_tri):
        for w in range(n_words):
            acc[w] = _ZERO
        for e in range(3):
            r = tri_edge_ranks[t, e]
            acc[r >> 6] ^= _ONE << np.uint64(r & 63)
        piv = _top_bit(acc)
        while piv >= 0 and owner[piv] >= 0:
            row = owner[piv]
            for w in range(n_words):
                acc[w] ^= store[row, w]
            piv = _top_bit(acc)
        if piv >= 0:
            owner[piv] = n_stored
            for w in range(n_words):
                store[n_stored, w] = acc[w]
            n_stored += 1
            pair_edge[t] = piv
    return pair_edge
