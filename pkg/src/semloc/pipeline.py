"""The four-stage localization pipeline: descriptors, initial matching,
inlier extraction, weighted pose solving.

`localize` wires the stages over in-memory objects and returns ranked
pose estimates plus diagnostics. Stage boundaries follow the module
split, so every stage stays independently testable and swappable (the
extractor stage in particular can be the clique machinery or a
sample-consensus baseline).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines, cliques, descriptors, matching, pose
from .descriptors import EmbeddingTable
from .errors import EmptyHypothesisSet, NoConsensus
from .scene import ObjectMap, ObservationSet


@dataclass(frozen=True)
class PipelineConfig:
    d_adj: float = 0.8
    d_comp: float = 0.3
    alpha: float = 0.7
    steps: int = 3
    matching: str = "adaptive"
    knn_k: int = 3
    top_m: int | None = None          # None: a quarter of the map
    extractor: str = "clique"
    top_n: int = 5
    max_cliques: int = 10_000
    min_clique_size: int = 3
    weights: str = "both"
    sac_iterations: int = 1000
    sac_inlier_threshold: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.matching not in ("one_to_one", "knn", "adaptive"):
            raise ValueError(f"unknown matching strategy {self.matching!r}")
        if self.extractor not in ("clique", "ransac", "prosac"):
            raise ValueError(f"unknown extractor {self.extractor!r}")
        if self.weights not in ("none", "sim", "com", "both"):
            raise ValueError(f"unknown weights mode {self.weights!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


@dataclass(frozen=True)
class LocalizationResult:
    estimates: tuple[pose.PoseEstimate, ...]
    candidates: tuple[matching.Correspondence, ...]
    best_inliers: tuple[int, ...]
    diagnostics: dict = field(default_factory=dict)

    def best(self) -> pose.PoseEstimate:
        return self.estimates[0]

    def inlier_correspondences(self) -> list[matching.Correspondence]:
        return [self.candidates[i] for i in self.best_inliers]


def match_candidates(similarity: np.ndarray, config: PipelineConfig) -> list[matching.Correspondence]:
    if config.matching == "one_to_one":
        return matching.match_one_to_one(similarity)
    if config.matching == "knn":
        return matching.match_knn(similarity, config.knn_k)
    top_m = config.top_m or matching.default_top_m(similarity.shape[1])
    return matching.match_adaptive(similarity, top_m)


def localize(omap: ObjectMap, obs: ObservationSet,
             embeddings: EmbeddingTable | None = None,
             config: PipelineConfig = PipelineConfig()) -> LocalizationResult:
    """Estimate the observer pose against the map.

    Raises EmptyHypothesisSet / NoConsensus / NoSolvableHypothesis when
    no usable hypothesis survives; ParseError and friends belong to the
    file layer, not here.
    """
    diags: dict = {"n_map": len(omap), "n_obs": len(obs)}

    map_graph = descriptors.build_semantic_graph(omap.landmarks, config.d_adj)
    obs_graph = descriptors.build_semantic_graph(obs.objects, config.d_adj)
    n_classes = max(map_graph.class_count(), obs_graph.class_count())
    similarity, missing = descriptors.similarity_matrix(
        omap.landmarks, obs.objects, map_graph, obs_graph,
        embeddings, config.alpha, config.steps, n_classes)
    descriptors.require_embeddings(missing, config.alpha)
    diags["missing_embedding_pairs"] = int(missing.sum()) if config.alpha > 0 else 0

    cands = match_candidates(similarity, config)
    diags["n_candidates"] = len(cands)

    if config.extractor == "clique":
        graph = cliques.build_compatibility(cands, omap, obs, config.d_comp)
        clique_set = cliques.enumerate_maximal_cliques(
            graph, [c.similarity for c in cands], config.max_cliques)
        diags["n_cliques"] = len(clique_set)
        diags["clique_limit_hit"] = clique_set.truncated
        hyps = cliques.top_n_hypotheses(clique_set, config.top_n, config.min_clique_size)
        estimates, solved, notes = pose.evaluate_hypotheses(hyps, cands, omap, obs, config.weights)
        diags["dropped_hypotheses"] = notes
        return LocalizationResult(tuple(estimates), tuple(cands),
                                  solved[0].member_indices, diags)

    cfg = baselines.SacConfig(rng_seed=config.seed,
                              max_iterations=config.sac_iterations,
                              inlier_threshold=config.sac_inlier_threshold)
    extract = baselines.ransac_extract if config.extractor == "ransac" else baselines.prosac_extract
    result = extract(cands, omap, obs, cfg)
    diags["consensus_size"] = len(result.inliers)
    diags["found_iteration"] = result.found_iteration
    return LocalizationResult((result.estimate,), tuple(cands), result.inliers, diags)


def with_overrides(config: PipelineConfig, **kwargs) -> PipelineConfig:
    """Config variant helper for sweeps."""
    return replace(config, **kwargs)
