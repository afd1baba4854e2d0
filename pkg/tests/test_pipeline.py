import numpy as np
import pytest
from numpy.testing import assert_allclose

from semloc.errors import EmptyHypothesisSet, MissingEmbedding
from semloc.geometry import rotation_angle
from semloc.harness import SceneSpec, generate_scene
from semloc.pipeline import PipelineConfig, localize, match_candidates, with_overrides


def _scene(**kw):
    kw.setdefault("n_landmarks", 24)
    kw.setdefault("rng_seed", 17)
    return generate_scene(SceneSpec(**kw))


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(matching="fuzzy")
    with pytest.raises(ValueError):
        PipelineConfig(extractor="hough")
    with pytest.raises(ValueError):
        PipelineConfig(alpha=1.5)
    with pytest.raises(ValueError):
        PipelineConfig(weights="w")


def test_localize_noiseless_all_strategies():
    scene = _scene()
    for matching in ("one_to_one", "knn", "adaptive"):
        cfg = PipelineConfig(matching=matching)
        result = localize(scene.omap, scene.observations, scene.embeddings, cfg)
        best = result.best()
        assert rotation_angle(best.pose.rotation.T @ scene.gt_pose.rotation) < 1e-6
        assert_allclose(best.pose.translation, scene.gt_pose.translation, atol=1e-6)
        got = {(c.map_index, c.obs_index) for c in result.inlier_correspondences()}
        assert got == set(scene.gt_correspondences)


def test_localize_sac_extractors():
    scene = _scene()
    for extractor in ("ransac", "prosac"):
        cfg = PipelineConfig(extractor=extractor, seed=3)
        result = localize(scene.omap, scene.observations, scene.embeddings, cfg)
        assert_allclose(result.best().pose.translation, scene.gt_pose.translation, atol=1e-6)
        assert result.diagnostics["consensus_size"] >= 3


def test_localize_without_embeddings_at_alpha_zero():
    scene = _scene()
    cfg = PipelineConfig(alpha=0.0)
    result = localize(scene.omap, scene.observations, None, cfg)
    assert_allclose(result.best().pose.translation, scene.gt_pose.translation, atol=1e-5)


def test_localize_alpha_one_requires_embeddings():
    scene = _scene()
    with pytest.raises(MissingEmbedding):
        localize(scene.omap, scene.observations, None, PipelineConfig(alpha=1.0))


def test_localize_partial_embeddings_soft_at_blend():
    scene = _scene()
    table = scene.embeddings
    # drop the observation embeddings: map rows stay, obs lookups miss
    keep = [i for i, eid in enumerate(table.ids) if eid < len(scene.omap.landmarks)]
    from semloc.descriptors import EmbeddingTable

    partial = EmbeddingTable(
        ids=tuple(table.ids[i] for i in keep),
        vectors=table.vectors[keep],
    )
    result = localize(scene.omap, scene.observations, partial, PipelineConfig())
    assert result.diagnostics["missing_embedding_pairs"] > 0
    # histogram term alone still pins the pose on a clean scene
    assert_allclose(result.best().pose.translation, scene.gt_pose.translation, atol=1e-5)


def test_localize_no_solution_on_scrambled_scene(rng):
    scene = _scene(n_landmarks=12)
    # scramble observation positions so no rigid hypothesis survives
    from semloc.scene import EllipsoidLandmark, ObservationSet

    scrambled = ObservationSet(
        objects=tuple(
            EllipsoidLandmark(
                position=rng.uniform(-50, 50, 3),
                orientation=o.orientation,
                axis_lengths=o.axis_lengths,
                class_id=o.class_id,
                embedding_id=o.embedding_id,
            )
            for o in scene.observations.objects
        )
    )
    with pytest.raises(EmptyHypothesisSet):
        localize(scene.omap, scrambled, scene.embeddings, PipelineConfig())


def test_match_candidates_strategies_diverge(rng):
    s = rng.uniform(0.0, 1.0, size=(10, 14))
    cands_o = match_candidates(s, PipelineConfig(matching="one_to_one"))
    cands_a = match_candidates(s, PipelineConfig(matching="adaptive"))
    cands_k = match_candidates(s, PipelineConfig(matching="knn", knn_k=3))
    assert len(cands_o) <= len(cands_a)
    assert len(cands_k) == 30
    # adaptive keeps every row's top pick, so it covers all observations
    assert {c.obs_index for c in cands_a} == set(range(10))


def test_diagnostics_contents():
    scene = _scene()
    result = localize(scene.omap, scene.observations, scene.embeddings, PipelineConfig())
    d = result.diagnostics
    assert d["n_map"] == 24
    assert d["n_obs"] == len(scene.observations.objects)
    assert d["n_candidates"] >= d["n_obs"]
    assert d["n_cliques"] >= 1
    assert d["clique_limit_hit"] is False
    assert "dropped_hypotheses" in d


def test_with_overrides():
    cfg = PipelineConfig()
    swapped = with_overrides(cfg, alpha=0.4, extractor="ransac")
    assert swapped.alpha == 0.4 and swapped.extractor == "ransac"
    assert cfg.alpha == 0.7  # original untouched
    with pytest.raises(ValueError):
        with_overrides(cfg, alpha=2.0)
