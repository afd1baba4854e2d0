"""Semantic graphs, walk-histogram descriptors, embeddings, and the
hybrid similarity that fuses them.

A landmark's structural descriptor counts every walk of exactly `steps`
nodes leaving it in the semantic graph (the start node is step 1, and
walks may revisit nodes, including immediate backtracking). Each walk is
binned by its class-label sequence, giving a C**steps histogram that is
L2-normalized; nodes with no walks keep the all-zero vector. Because the
first label of every walk from node v is v's own class, the histogram is
stored compactly as its non-zero block of C**(steps-1) suffix bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import MissingEmbedding
from .scene import EllipsoidLandmark

DEFAULT_D_ADJ = 0.8
DEFAULT_ALPHA = 0.7
DEFAULT_STEPS = 3


@dataclass(frozen=True)
class SemanticGraph:
    """Proximity graph over landmarks: edge iff distance < d_adj (strict)."""

    node_classes: np.ndarray
    adjacency: np.ndarray
    d_adj: float

    def __post_init__(self):
        cls = np.asarray(self.node_classes, dtype=np.int64)
        adj = np.asarray(self.adjacency, dtype=bool)
        n = cls.shape[0]
        if adj.shape != (n, n):
            raise ValueError("adjacency must be n x n")
        if adj.diagonal().any():
            raise ValueError("adjacency diagonal must be empty")
        if (adj != adj.T).any():
            raise ValueError("adjacency must be symmetric")
        cls.setflags(write=False)
        adj.setflags(write=False)
        object.__setattr__(self, "node_classes", cls)
        object.__setattr__(self, "adjacency", adj)

    def __len__(self) -> int:
        return self.node_classes.shape[0]

    def class_count(self) -> int:
        return int(self.node_classes.max()) + 1 if len(self) else 0


@dataclass(frozen=True)
class SemanticHistogram:
    """Normalized walk histogram of one node; dimension C**s."""

    values: np.ndarray
    n_classes: int
    steps: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.n_classes ** self.steps,):
            raise ValueError("histogram dimension must be n_classes**steps")
        norm = float(np.linalg.norm(v))
        if norm != 0.0 and abs(norm - 1.0) > 1e-9:
            raise ValueError("histogram must be L2-normalized or all-zero")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def build_semantic_graph(landmarks, d_adj: float = DEFAULT_D_ADJ) -> SemanticGraph:
    """Connect landmarks strictly closer than d_adj (an exact-threshold
    pair stays disconnected)."""
    if d_adj <= 0:
        raise ValueError("d_adj must be positive")
    landmarks = list(landmarks)
    classes = np.array([lm.class_id for lm in landmarks], dtype=np.int64)
    n = len(landmarks)
    if n == 0:
        return SemanticGraph(classes, np.zeros((0, 0), dtype=bool), d_adj)
    pos = np.array([lm.position for lm in landmarks])
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    adj = dist < d_adj
    np.fill_diagonal(adj, False)
    return SemanticGraph(classes, adj, d_adj)


def walk_suffix_matrix(graph: SemanticGraph, steps: int = DEFAULT_STEPS,
                       n_classes: int | None = None,
                       normalized: bool = True) -> np.ndarray:
    """All nodes' walk histograms in compact suffix form.

    Row v holds the C**(steps-1) suffix bins of node v (see module
    docstring); with `normalized` each row is L2-normalized, zero rows
    left alone. Dot products of same-class rows equal dot products of
    the corresponding full histograms, which is all the similarity
    computation needs.
    """
    if n_classes is None:
        n_classes = graph.class_count()
    if len(graph) and graph.node_classes.max() >= n_classes:
        raise ValueError("n_classes too small for the graph's labels")
    counts = _kernels.walk_suffix_counts(
        graph.adjacency.astype(np.uint8), graph.node_classes, n_classes, steps)
    if not normalized:
        return counts
    vals = counts.astype(np.float64)
    norms = np.linalg.norm(vals, axis=1, keepdims=True)
    np.divide(vals, norms, out=vals, where=norms > 0)
    return vals


def semantic_histogram(graph: SemanticGraph, node: int, steps: int = DEFAULT_STEPS,
                       n_classes: int | None = None) -> SemanticHistogram:
    """Full C**steps histogram of a single node."""
    if not 0 <= node < len(graph):
        raise IndexError(f"node {node} out of range")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if n_classes is None:
        n_classes = graph.class_count()
    suffix = walk_suffix_matrix(graph, steps, n_classes, normalized=False)[node]
    width = n_classes ** (steps - 1)
    full = np.zeros(n_classes ** steps, dtype=np.float64)
    block = int(graph.node_classes[node]) * width
    full[block:block + width] = suffix
    norm = np.linalg.norm(full)
    if norm > 0:
        full /= norm
    return SemanticHistogram(full, n_classes, steps)


class EmbeddingTable:
    """Unit-norm embedding vectors addressed by integer id."""

    def __init__(self, ids, vectors, norm_tol: float = 1e-6):
        ids = [int(i) for i in ids]
        vecs = np.asarray(vectors, dtype=np.float64)
        if vecs.ndim != 2 or vecs.shape[0] != len(ids):
            raise ValueError("vectors must be (len(ids), dim)")
        if len(set(ids)) != len(ids):
            raise ValueError("embedding ids must be unique")
        norms = np.linalg.norm(vecs, axis=1)
        bad = np.abs(norms - 1.0) > norm_tol
        if bad.any():
            raise ValueError(f"{int(bad.sum())} embedding rows are not unit-norm")
        vecs.setflags(write=False)
        self.ids = tuple(ids)
        self.vectors = vecs
        self.dim = vecs.shape[1] if len(ids) else 0
        self._row = {i: r for r, i in enumerate(ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, embedding_id) -> bool:
        return embedding_id in self._row

    def get(self, embedding_id) -> np.ndarray | None:
        row = self._row.get(embedding_id)
        return None if row is None else self.vectors[row]


def hybrid_similarity(map_lm: EllipsoidLandmark, obs_lm: EllipsoidLandmark,
                      sh_map: SemanticHistogram, sh_obs: SemanticHistogram,
                      embeddings: EmbeddingTable | None,
                      alpha: float = DEFAULT_ALPHA,
                      missing_pairs: list | None = None) -> float:
    """alpha-weighted sum of embedding and histogram dot products.

    A pair lacking an embedding contributes 0 on the embedding side and
    is appended to `missing_pairs` when given; that softness is the
    contract here, escalation to a hard error is the pipeline's call.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    if (sh_map.n_classes, sh_map.steps) != (sh_obs.n_classes, sh_obs.steps):
        raise ValueError("histograms must share (n_classes, steps)")
    s_sh = float(sh_map.values @ sh_obs.values)
    s_clip = 0.0
    if alpha > 0.0:
        vm = embeddings.get(map_lm.embedding_id) if embeddings is not None else None
        vo = embeddings.get(obs_lm.embedding_id) if embeddings is not None else None
        if vm is None or vo is None:
            if missing_pairs is not None:
                missing_pairs.append((map_lm.embedding_id, obs_lm.embedding_id))
        else:
            s_clip = float(vm @ vo)
    return alpha * s_clip + (1.0 - alpha) * s_sh


def similarity_matrix(map_landmarks, obs_landmarks,
                      map_graph: SemanticGraph, obs_graph: SemanticGraph,
                      embeddings: EmbeddingTable | None,
                      alpha: float = DEFAULT_ALPHA, steps: int = DEFAULT_STEPS,
                      n_classes: int | None = None):
    """Dense observation-by-map hybrid similarity.

    Returns (S, missing) where S[n, m] is the hybrid similarity between
    observation n and map landmark m and `missing` marks pairs whose
    embedding lookup failed (those pairs used s_clip = 0).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    map_landmarks = list(map_landmarks)
    obs_landmarks = list(obs_landmarks)
    n_m, n_o = len(map_landmarks), len(obs_landmarks)
    if n_classes is None:
        n_classes = max(map_graph.class_count(), obs_graph.class_count())

    sh_map = walk_suffix_matrix(map_graph, steps, n_classes)
    sh_obs = walk_suffix_matrix(obs_graph, steps, n_classes)
    s_sh = sh_obs @ sh_map.T
    # suffix blocks only compare within the start node's own class
    same = obs_graph.node_classes[:, None] == map_graph.node_classes[None, :]
    s_sh = np.where(same, s_sh, 0.0)

    missing = np.zeros((n_o, n_m), dtype=bool)
    if alpha == 0.0:
        return (1.0 - alpha) * s_sh, missing

    def _rows(landmarks):
        rows = np.zeros((len(landmarks), embeddings.dim if embeddings else 0))
        have = np.zeros(len(landmarks), dtype=bool)
        for i, lm in enumerate(landmarks):
            v = embeddings.get(lm.embedding_id) if embeddings is not None else None
            if v is not None:
                rows[i] = v
                have[i] = True
        return rows, have

    emb_map, have_map = _rows(map_landmarks)
    emb_obs, have_obs = _rows(obs_landmarks)
    s_clip = emb_obs @ emb_map.T if embeddings is not None and embeddings.dim else np.zeros((n_o, n_m))
    missing = ~(have_obs[:, None] & have_map[None, :])
    s_clip = np.where(missing, 0.0, s_clip)
    return alpha * s_clip + (1.0 - alpha) * s_sh, missing


def require_embeddings(missing: np.ndarray, alpha: float) -> None:
    """Escalate missing embeddings to a hard error when alpha = 1 (the
    histogram term is then absent and silent zeros would be meaningless)."""
    if alpha == 1.0 and missing.any():
        n = int(missing.sum())
        raise MissingEmbedding(f"alpha=1 requires embeddings for all pairs; {n} pairs lack them")
