"""Spatial-compatibility graph over correspondence candidates and
maximal-clique hypothesis extraction.

Two candidates are compatible when pairing both preserves the
inter-landmark distance (rigid motion cannot stretch space) and they
collide on neither landmark. Every maximal clique of mutually
compatible candidates is a pose hypothesis, scored by its similarity
sum; geometry does the heavy filtering and similarity does the ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyHypothesisSet
from .matching import Correspondence
from .scene import ObjectMap, ObservationSet

DEFAULT_D_COMP = 0.3
DEFAULT_MAX_CLIQUES = 10_000
MIN_POSE_CLIQUE = 3


@dataclass(frozen=True)
class CompatibilityGraph:
    adjacency: np.ndarray
    d_comp: float

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if adj.diagonal().any():
            raise ValueError("diagonal must be empty")
        if (adj != adj.T).any():
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    def __len__(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class CliqueHypothesis:
    """Maximal set of mutually compatible candidates; score = similarity sum."""

    member_indices: tuple[int, ...]
    score: float

    def __len__(self) -> int:
        return len(self.member_indices)


@dataclass(frozen=True)
class CliqueSet:
    """Ranked hypotheses plus a truncation marker.

    `truncated` is a soft signal that enumeration stopped at the clique
    limit; results are then the deterministic prefix of the full set.
    """

    hypotheses: tuple[CliqueHypothesis, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)


def build_compatibility(cands: list[Correspondence], omap: ObjectMap,
                        obs: ObservationSet, d_comp: float = DEFAULT_D_COMP) -> CompatibilityGraph:
    if d_comp <= 0:
        raise ValueError("d_comp must be positive")
    k = len(cands)
    if k == 0:
        return CompatibilityGraph(np.zeros((0, 0), dtype=bool), d_comp)
    map_pos = np.array([omap.landmarks[c.map_index].position for c in cands])
    obs_pos = np.array([obs.objects[c.obs_index].position for c in cands])
    map_idx = np.array([c.map_index for c in cands], dtype=np.int64)
    obs_idx = np.array([c.obs_index for c in cands], dtype=np.int64)
    adj = _kernels.compat_matrix(map_pos, obs_pos, map_idx, obs_idx, float(d_comp))
    return CompatibilityGraph(adj.astype(bool), d_comp)


def enumerate_maximal_cliques(graph: CompatibilityGraph,
                              similarities,
                              max_cliques: int = DEFAULT_MAX_CLIQUES) -> CliqueSet:
    """All maximal cliques, scored and ranked.

    Ordering: descending score, then larger cardinality, then
    lexicographic members. Enumeration halts deterministically once
    max_cliques cliques have been produced and the result is flagged
    truncated.
    """
    sims = np.asarray(similarities, dtype=np.float64)
    if sims.shape != (len(graph),):
        raise ValueError("similarities must have one entry per candidate")
    raw, truncated = _kernels.max_cliques(
        graph.adjacency.astype(np.uint8), int(max_cliques))
    hyps = [CliqueHypothesis(members, float(sims[list(members)].sum()))
            for members in raw]
    hyps.sort(key=lambda h: (-h.score, -len(h.member_indices), h.member_indices))
    return CliqueSet(tuple(hyps), bool(truncated))


def top_n_hypotheses(cliques: CliqueSet | list[CliqueHypothesis],
                     n: int, min_size: int = MIN_POSE_CLIQUE) -> list[CliqueHypothesis]:
    """Best n hypotheses large enough to constrain a full pose.

    Three correspondences are the floor for an unambiguous 6-DoF
    solution, so smaller cliques are diagnostics, not hypotheses.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pool = list(cliques)
    viable = [h for h in pool if len(h) >= min_size]
    if not viable:
        raise EmptyHypothesisSet(
            f"no clique of size >= {min_size} among {len(pool)} cliques")
    return viable[:n]
