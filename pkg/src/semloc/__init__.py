"""Object-level global localization against an ellipsoid landmark map.

Pipeline: per-landmark descriptors (walk histograms over the proximity
graph fused with appearance embeddings), initial correspondence
matching, inlier extraction via maximal cliques of the spatial
compatibility graph, and closed-form weighted pose solving. Sample
consensus baselines, a synthetic evaluation harness, and a CLI ride
along. Hot kernels run on a compiled extension when built, with a pure
NumPy fallback (`semloc._kernels.BACKEND` names the active one).
"""

from ._kernels import BACKEND
from .baselines import SacConfig, SacResult, prosac_extract, ransac_extract
from .cliques import (CliqueHypothesis, CliqueSet, CompatibilityGraph,
                      build_compatibility, enumerate_maximal_cliques,
                      top_n_hypotheses)
from .descriptors import (EmbeddingTable, SemanticGraph, SemanticHistogram,
                          build_semantic_graph, hybrid_similarity,
                          semantic_histogram, similarity_matrix)
from .errors import (DegenerateCloud, DegenerateGeometry, EmptyHypothesisSet,
                     InsufficientPairs, MissingEmbedding, NoConsensus,
                     NoSolvableHypothesis, ParseError, SchemaWarning,
                     SemlocError)
from .fileio import (load_embeddings, load_map, load_observation,
                     save_embeddings, save_map, save_observation)
from .harness import (EvalReport, SceneSpec, SyntheticScene, evaluate_matching,
                      evaluate_pose, generate_scene)
from .matching import (Correspondence, match_adaptive, match_knn,
                       match_one_to_one)
from .pipeline import LocalizationResult, PipelineConfig, localize
from .pose import (PoseEstimate, WeightedCorrespondenceSet, completeness_weight,
                   evaluate_hypotheses, solve_weighted_pose)
from .scene import (EllipsoidLandmark, ObjectMap, ObservationSet, Pose,
                    fit_ellipsoid)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Correspondence", "CliqueHypothesis", "CliqueSet",
    "CompatibilityGraph", "DegenerateCloud", "DegenerateGeometry",
    "EllipsoidLandmark", "EmbeddingTable", "EmptyHypothesisSet", "EvalReport",
    "InsufficientPairs", "LocalizationResult", "MissingEmbedding",
    "NoConsensus", "NoSolvableHypothesis", "ObjectMap", "ObservationSet",
    "ParseError", "PipelineConfig", "Pose", "PoseEstimate", "SacConfig",
    "SacResult", "SceneSpec", "SchemaWarning", "SemanticGraph",
    "SemanticHistogram", "SemlocError", "SyntheticScene",
    "WeightedCorrespondenceSet", "build_compatibility", "build_semantic_graph",
    "completeness_weight", "enumerate_maximal_cliques", "evaluate_hypotheses",
    "evaluate_matching", "evaluate_pose", "fit_ellipsoid", "generate_scene",
    "hybrid_similarity", "load_embeddings", "load_map", "load_observation",
    "localize", "match_adaptive", "match_knn", "match_one_to_one",
    "prosac_extract", "ransac_extract", "save_embeddings", "save_map",
    "save_observation", "semantic_histogram", "similarity_matrix",
    "solve_weighted_pose", "top_n_hypotheses",
]
