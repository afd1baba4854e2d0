# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors _pure.py function for function; outputs
must be bit-identical to the pure backend (see that module's docstring).
"""

from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free
from libc.string cimport memset

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "native"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def walk_suffix_counts(adjacency, classes, int n_classes, int steps):
    """See _pure.walk_suffix_counts."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] adj = \
        np.ascontiguousarray(adjacency, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] cls = \
        np.ascontiguousarray(classes, dtype=np.int64)
    cdef Py_ssize_t n = adj.shape[0]
    if adj.shape[1] != n:
        raise ValueError("adjacency must be square")
    if cls.shape[0] != n:
        raise ValueError("classes length must match adjacency")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if n_classes < 1:
        raise ValueError("n_classes must be >= 1")

    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] cur = \
        np.ones((n, 1), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] nxt
    cdef Py_ssize_t t, width, v, u, j, base
    cdef cnp.int64_t a
    for t in range(1, steps):
        width = 1
        for j in range(t - 1):
            width *= n_classes
        nxt = np.zeros((n, n_classes * width), dtype=np.int64)
        with nogil:
            for v in range(n):
                for u in range(n):
                    a = adj[v, u]
                    if a == 0:
                        continue
                    base = cls[u] * width
                    for j in range(width):
                        nxt[v, base + j] += a * cur[u, j]
        cur = nxt
    return np.asarray(cur)


def compat_matrix(map_pos, obs_pos, map_idx, obs_idx, double d_comp):
    """See _pure.compat_matrix."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] mp = \
        np.ascontiguousarray(map_pos, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] op = \
        np.ascontiguousarray(obs_pos, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] mi = \
        np.ascontiguousarray(map_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] oi = \
        np.ascontiguousarray(obs_idx, dtype=np.int64)
    cdef Py_ssize_t k = mp.shape[0]
    if mp.shape[1] != 3 or op.shape[0] != k or op.shape[1] != 3:
        raise ValueError("positions must be (k, 3)")
    if d_comp <= 0:
        raise ValueError("d_comp must be positive")

    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] out = \
        np.zeros((k, k), dtype=np.uint8)
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, dm, do
    with nogil:
        for i in range(k):
            for j in range(i + 1, k):
                if mi[i] == mi[j] or oi[i] == oi[j]:
                    continue
                dx = mp[i, 0] - mp[j, 0]
                dy = mp[i, 1] - mp[j, 1]
                dz = mp[i, 2] - mp[j, 2]
                dm = sqrt((dx * dx + dy * dy) + dz * dz)
                dx = op[i, 0] - op[j, 0]
                dy = op[i, 1] - op[j, 1]
                dz = op[i, 2] - op[j, 2]
                do = sqrt((dx * dx + dy * dy) + dz * dz)
                if fabs(dm - do) < d_comp:
                    out[i, j] = 1
                    out[j, i] = 1
    return np.asarray(out)


cdef struct BkState:
    unsigned long long *nbr      # n bitset rows of nw words each
    unsigned long long *work     # 3 buffers (snapshot, child P, child X) per depth
    int *members                 # clique under construction
    Py_ssize_t nw
    Py_ssize_t max_count
    bint stop


cdef inline Py_ssize_t _popcount_and(unsigned long long *a,
                                     unsigned long long *b,
                                     Py_ssize_t nw) nogil:
    cdef Py_ssize_t w, total = 0
    for w in range(nw):
        total += __builtin_popcountll(a[w] & b[w])
    return total


cdef void _expand(BkState *st, Py_ssize_t depth,
                  unsigned long long *p, unsigned long long *x,
                  list out):
    cdef Py_ssize_t nw = st.nw
    cdef Py_ssize_t w, u, v, best, pivot, deg, i
    cdef unsigned long long word
    cdef unsigned long long *row
    cdef unsigned long long *snap = st.work + 3 * depth * nw
    cdef unsigned long long *cp = snap + nw
    cdef unsigned long long *cx = cp + nw

    cdef bint empty = True
    for w in range(nw):
        if p[w] or x[w]:
            empty = False
            break
    if empty:
        out.append(tuple(sorted(st.members[i] for i in range(depth))))
        if len(out) >= st.max_count:
            st.stop = True
        return

    # pivot: most neighbours inside P, ties to the lowest vertex index
    pivot = -1
    best = -1
    for w in range(nw):
        word = p[w] | x[w]
        while word:
            u = w * 64 + __builtin_ctzll(word)
            word &= word - 1
            deg = _popcount_and(st.nbr + u * nw, p, nw)
            if deg > best:
                best = deg
                pivot = u

    # snapshot of P \ N(pivot); P shrinks while we walk the snapshot
    row = st.nbr + pivot * nw
    for w in range(nw):
        snap[w] = p[w] & ~row[w]

    for w in range(nw):
        word = snap[w]
        while word:
            v = w * 64 + __builtin_ctzll(word)
            word &= word - 1
            row = st.nbr + v * nw
            for i in range(nw):
                cp[i] = p[i] & row[i]
                cx[i] = x[i] & row[i]
            st.members[depth] = <int> v
            _expand(st, depth + 1, cp, cx, out)
            if st.stop:
                return
            p[v >> 6] &= ~(1ULL << (v & 63))
            x[v >> 6] |= 1ULL << (v & 63)


def max_cliques(adjacency, Py_ssize_t max_count):
    """See _pure.max_cliques."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] adj = \
        np.ascontiguousarray(adjacency, dtype=np.uint8)
    cdef Py_ssize_t n = adj.shape[0]
    if adj.shape[1] != n:
        raise ValueError("adjacency must be square")
    if max_count < 1:
        raise ValueError("max_count must be >= 1")
    out: list = []
    if n == 0:
        return out, False

    cdef Py_ssize_t nw = (n + 63) // 64
    cdef BkState st
    st.nw = nw
    st.max_count = max_count
    st.stop = False
    st.nbr = <unsigned long long *> malloc(n * nw * sizeof(unsigned long long))
    st.work = <unsigned long long *> malloc(3 * (n + 2) * nw * sizeof(unsigned long long))
    st.members = <int *> malloc(n * sizeof(int))
    cdef unsigned long long *root = \
        <unsigned long long *> malloc(2 * nw * sizeof(unsigned long long))
    if st.nbr == NULL or st.work == NULL or st.members == NULL or root == NULL:
        free(st.nbr); free(st.work); free(st.members); free(root)
        raise MemoryError()
    memset(st.nbr, 0, n * nw * sizeof(unsigned long long))

    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if adj[i, j] and i != j:
                st.nbr[i * nw + (j >> 6)] |= 1ULL << (j & 63)

    cdef unsigned long long *p0 = root
    cdef unsigned long long *x0 = root + nw
    memset(x0, 0, nw * sizeof(unsigned long long))
    for i in range(nw):
        p0[i] = ~0ULL
    if n & 63:
        p0[nw - 1] = (1ULL << (n & 63)) - 1

    try:
        _expand(&st, 0, p0, x0, out)
    finally:
        free(st.nbr); free(st.work); free(st.members); free(root)
    return out, bool(st.stop)
