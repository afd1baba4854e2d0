"""Pure-Python/NumPy reference implementations of the hot kernels.

The compiled backend in ``_native.pyx`` mirrors these functions exactly.
Outputs must be bit-identical between the two: integer kernels are exact
by construction, and the floating-point kernel fixes its summation
order, so any divergence is a bug, not noise. The equivalence suite
compares them element-for-element.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def walk_suffix_counts(adjacency: np.ndarray, classes: np.ndarray,
                       n_classes: int, steps: int) -> np.ndarray:
    """Count class-labeled walks of exactly `steps` nodes from every node.

    Returns an (n, n_classes**(steps-1)) int64 matrix. Row v bins the
    walks starting at v by the class sequence of nodes 2..steps, most
    significant digit first (the first hop is the highest digit). The
    start node's own class is not encoded; callers prepend it when the
    full histogram layout is needed.
    """
    adj = np.ascontiguousarray(adjacency, dtype=np.int64)
    cls = np.asarray(classes, dtype=np.int64)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError("adjacency must be square")
    if cls.shape != (n,):
        raise ValueError("classes length must match adjacency")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if n_classes < 1:
        raise ValueError("n_classes must be >= 1")

    counts = np.ones((n, 1), dtype=np.int64)
    for t in range(1, steps):
        width = n_classes ** (t - 1)
        nxt = np.zeros((n, n_classes * width), dtype=np.int64)
        for c in range(n_classes):
            members = np.flatnonzero(cls == c)
            if members.size == 0:
                continue
            # walks v -> u -> (suffix) with class(u) = c land in block c
            nxt[:, c * width:(c + 1) * width] = adj[:, members] @ counts[members]
        counts = nxt
    return counts


def compat_matrix(map_pos: np.ndarray, obs_pos: np.ndarray,
                  map_idx: np.ndarray, obs_idx: np.ndarray,
                  d_comp: float) -> np.ndarray:
    """Pairwise rigid-distance compatibility of correspondence candidates.

    Entry (i, j) is 1 iff the map-pair and obs-pair distances agree
    within d_comp, i != j, and the candidates share neither a map nor an
    observation landmark. Summation order inside the squared distance is
    fixed as (dx*dx + dy*dy) + dz*dz to match the compiled backend bit
    for bit.
    """
    mp = np.asarray(map_pos, dtype=np.float64)
    op = np.asarray(obs_pos, dtype=np.float64)
    mi = np.asarray(map_idx, dtype=np.int64)
    oi = np.asarray(obs_idx, dtype=np.int64)
    k = mp.shape[0]
    if mp.shape != (k, 3) or op.shape != (k, 3):
        raise ValueError("positions must be (k, 3)")
    if d_comp <= 0:
        raise ValueError("d_comp must be positive")

    def _pairdist(p):
        dx = p[:, None, 0] - p[None, :, 0]
        dy = p[:, None, 1] - p[None, :, 1]
        dz = p[:, None, 2] - p[None, :, 2]
        return np.sqrt((dx * dx + dy * dy) + dz * dz)

    ok = np.abs(_pairdist(mp) - _pairdist(op)) < d_comp
    ok &= mi[:, None] != mi[None, :]
    ok &= oi[:, None] != oi[None, :]
    np.fill_diagonal(ok, False)
    return ok.astype(np.uint8)


def _row_masks(adjacency: np.ndarray) -> list[int]:
    adj = np.asarray(adjacency, dtype=np.uint8)
    masks = []
    for i, row in enumerate(adj):
        packed = np.packbits(row, bitorder="little").tobytes()
        # self-loops never count as neighbours
        masks.append(int.from_bytes(packed, "little") & ~(1 << i))
    return masks


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def max_cliques(adjacency: np.ndarray, max_count: int) -> tuple[list[tuple[int, ...]], bool]:
    """Enumerate maximal cliques (Bron-Kerbosch with pivoting).

    Deterministic: the pivot is the vertex of P u X with the most
    neighbours in P (ties to the lowest index) and branch vertices are
    visited in ascending order, so the emission sequence is reproducible
    and shared with the compiled backend. Enumeration halts once
    max_count cliques have been emitted; the second return value
    reports whether that limit was hit.
    """
    n = int(np.asarray(adjacency).shape[0])
    if max_count < 1:
        raise ValueError("max_count must be >= 1")
    if n == 0:
        return [], False
    nbr = _row_masks(adjacency)
    out: list[tuple[int, ...]] = []
    stop = False

    def expand(r: list[int], p: int, x: int) -> None:
        nonlocal stop
        if p == 0 and x == 0:
            out.append(tuple(sorted(r)))
            if len(out) >= max_count:
                stop = True
            return
        pivot, best = -1, -1
        both = p | x
        for u in _bits(both):
            deg = (nbr[u] & p).bit_count()
            if deg > best:
                best, pivot = deg, u
        for v in _bits(p & ~nbr[pivot]):
            bit = 1 << v
            r.append(v)
            expand(r, p & nbr[v], x & nbr[v])
            r.pop()
            if stop:
                return
            p &= ~bit
            x |= bit

    expand([], (1 << n) - 1, 0)
    return out, stop
