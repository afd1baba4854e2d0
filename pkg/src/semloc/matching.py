"""Initial correspondence candidates from the similarity matrix.

Three selectable strategies: mutual best pair, k nearest per
observation, and the adaptive similarity-gap rule. The class label is
deliberately not a hard filter anywhere here; only scores decide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Correspondence:
    map_index: int
    obs_index: int
    similarity: float

    def __post_init__(self):
        if not math.isfinite(self.similarity):
            raise ValueError("similarity must be finite")


def _as_matrix(s) -> np.ndarray:
    m = np.asarray(s, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("similarity matrix must be 2-D (observations x map)")
    if not np.all(np.isfinite(m)):
        raise ValueError("similarity matrix must be finite")
    return m


def _sorted_desc(row: np.ndarray) -> np.ndarray:
    # stable sort on negated values keeps ties in low-index-first order
    return np.argsort(-row, kind="stable")


def match_one_to_one(s) -> list[Correspondence]:
    """Pairs that are each other's best choice; argmax ties go to the
    lowest index, so a tie can break mutuality."""
    m = _as_matrix(s)
    if m.size == 0:
        return []
    best_map = m.argmax(axis=1)
    best_obs = m.argmax(axis=0)
    out = []
    for n in range(m.shape[0]):
        col = int(best_map[n])
        if int(best_obs[col]) == n:
            out.append(Correspondence(col, n, float(m[n, col])))
    return out


def match_knn(s, k: int = 3) -> list[Correspondence]:
    """Top min(k, N_m) map landmarks per observation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = _as_matrix(s)
    out = []
    take = min(k, m.shape[1])
    for n in range(m.shape[0]):
        for col in _sorted_desc(m[n])[:take]:
            out.append(Correspondence(int(col), n, float(m[n, col])))
    return out


def match_adaptive(s, top_m: int) -> list[Correspondence]:
    """Per-row adaptive candidate count via the largest similarity gap.

    Sort the row descending, keep the best min(top_m, N_m), locate the
    adjacent pair with the largest drop (earliest wins ties), and select
    everything before the drop. The smaller member of the gap pair is
    the implied threshold; the selection is exactly the candidates above
    it except in the all-tied row, which degenerates to the single top
    candidate.
    """
    if top_m < 2:
        raise ValueError("top_m must be >= 2")
    m = _as_matrix(s)
    out = []
    for n in range(m.shape[0]):
        order = _sorted_desc(m[n])[:min(top_m, m.shape[1])]
        vals = m[n, order]
        if order.size < 2:
            keep = 1
        else:
            gaps = vals[:-1] - vals[1:]
            keep = int(np.argmax(gaps)) + 1
        for col in order[:keep]:
            out.append(Correspondence(int(col), n, float(m[n, col])))
    return out


def default_top_m(n_map: int) -> int:
    """A quarter of the map, never fewer than two."""
    return max(2, math.ceil(n_map / 4))
