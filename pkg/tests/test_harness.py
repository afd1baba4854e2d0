import numpy as np
import pytest
from numpy.testing import assert_allclose

from semloc.geometry import rotation_angle
from semloc.harness import (
    SceneSpec,
    aggregate,
    candidate_outlier_set,
    evaluate_matching,
    evaluate_pose,
    fit_r2,
    generate_scene,
    run_scene,
    run_suite,
    tile_scene,
)
from semloc.matching import Correspondence
from semloc.pipeline import PipelineConfig, localize
from semloc.pose import PoseEstimate
from semloc.scene import Pose


def test_generation_is_deterministic():
    spec = SceneSpec(n_landmarks=20, rng_seed=9, position_noise_sigma=0.02)
    a = generate_scene(spec)
    b = generate_scene(spec)
    assert_allclose(a.omap.positions(), b.omap.positions())
    assert_allclose(a.gt_pose.rotation, b.gt_pose.rotation)
    assert a.gt_correspondences == b.gt_correspondences
    assert_allclose(a.embeddings.vectors, b.embeddings.vectors)


def test_scene_shapes_and_gt():
    spec = SceneSpec(n_landmarks=25, dropout_rate=0.2, rng_seed=3)
    scene = generate_scene(spec)
    assert len(scene.omap.landmarks) == 25
    n_obs = len(scene.observations.objects)
    assert n_obs == 25 - round(25 * 0.2)
    assert len(scene.gt_correspondences) == n_obs
    # observations sit in the sensor frame: applying gt maps them back
    for m, o in scene.gt_correspondences:
        pred = scene.gt_pose.apply(scene.observations.objects[o].position[None, :])[0]
        assert_allclose(pred, scene.omap.landmarks[m].position, atol=1e-9)
    assert scene.observations.source_pose_gt is not None


def test_scene_landmark_separation():
    scene = generate_scene(SceneSpec(n_landmarks=40, rng_seed=1))
    pos = scene.omap.positions()
    d = np.linalg.norm(pos[:, None] - pos[None, :], axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() >= 0.4


def test_noiseless_scene_localizes_exactly():
    scene = generate_scene(SceneSpec(n_landmarks=24, rng_seed=5))
    result = localize(scene.omap, scene.observations, scene.embeddings, PipelineConfig())
    best = result.best()
    assert rotation_angle(best.pose.rotation.T @ scene.gt_pose.rotation) < 1e-6
    assert_allclose(best.pose.translation, scene.gt_pose.translation, atol=1e-6)


def test_duplicate_cluster_creates_two_modes():
    scene = generate_scene(SceneSpec(n_landmarks=30, duplicate_cluster=6, rng_seed=7))
    assert len(scene.omap.landmarks) == 36
    assert len(scene.pose_modes) == 2
    t_a = scene.pose_modes[0].translation
    t_b = scene.pose_modes[1].translation
    assert np.linalg.norm(t_a - t_b) > 10.0  # far apart by construction
    assert_allclose(scene.pose_modes[0].rotation, scene.pose_modes[1].rotation)


def test_evaluate_matching_counts():
    gt = [(0, 0), (1, 1), (2, 2), (3, 3)]
    pred = [
        Correspondence(map_index=0, obs_index=0, similarity=1.0),
        Correspondence(map_index=1, obs_index=1, similarity=1.0),
        Correspondence(map_index=9, obs_index=2, similarity=1.0),
    ]
    score = evaluate_matching(pred, gt)
    assert_allclose(score.precision, 100.0 * 2 / 3)
    assert_allclose(score.recall, 100.0 * 2 / 4)
    assert not score.empty_prediction
    empty = evaluate_matching([], gt)
    assert empty.precision == 0.0 and empty.recall == 0.0 and empty.empty_prediction
    with pytest.raises(ValueError):
        evaluate_matching(pred, [])


def _estimate(rot, t, score=1.0):
    return PoseEstimate(
        pose=Pose(rotation=rot, translation=np.asarray(t, dtype=float)),
        weighted_rms_residual=0.0,
        hypothesis_score=score,
    )


def test_evaluate_pose_ranks():
    gt = Pose(rotation=np.eye(3), translation=np.zeros(3))
    est = [
        _estimate(np.eye(3), [5.0, 0, 0], score=2.0),  # rank 1, 5 m off
        _estimate(np.eye(3), [0.2, 0, 0], score=1.0),  # rank 2, good
    ]
    ev = evaluate_pose(est, gt)
    assert_allclose(ev.te_per_rank, [5.0, 0.2])
    assert not ev.success_at(1)
    assert ev.success_at(2)
    assert ev.rotation_error < 1e-12


def test_evaluate_pose_rotation_error():
    gt = Pose(rotation=np.eye(3), translation=np.zeros(3))
    rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    ev = evaluate_pose([_estimate(rot, [0, 0, 0])], gt)
    assert_allclose(ev.rotation_error, np.pi / 2)


def test_run_scene_and_aggregate():
    scene = generate_scene(SceneSpec(n_landmarks=25, position_noise_sigma=0.02, rng_seed=12))
    outcome = run_scene(scene, PipelineConfig())
    assert outcome.failure is None
    assert outcome.pose.translation_error < 0.5
    report = aggregate([outcome, outcome])
    assert report.n_scenes == 2 and report.n_failed == 0
    assert report.success_rate_top1 == 100.0


def test_run_suite_aggregates_independent_scenes():
    spec = SceneSpec(n_landmarks=20, position_noise_sigma=0.02)
    report = run_suite(spec, PipelineConfig(), n_scenes=3, seed=100)
    assert report.n_scenes == 3 and report.n_failed == 0
    assert 0.0 < report.translation_error < 0.5
    # a different base seed draws different scenes
    other = run_suite(spec, PipelineConfig(), n_scenes=3, seed=200)
    assert other.translation_error != report.translation_error


def test_tile_scene_grows_map_only():
    scene = generate_scene(SceneSpec(n_landmarks=20, rng_seed=2))
    big = tile_scene(scene, 80)
    assert len(big.omap.landmarks) == 80
    assert len(big.observations.objects) == len(scene.observations.objects)
    # observed region keeps its ground truth
    result = localize(big.omap, big.observations, big.embeddings, PipelineConfig())
    assert_allclose(result.best().pose.translation, big.gt_pose.translation, atol=1e-6)


def test_fit_r2_separates_linear_from_quadratic():
    x = np.array([100.0, 200.0, 400.0, 800.0])
    lin = 3.0 * x + 5.0
    quad = 0.01 * x**2 + 2.0
    assert fit_r2(x, lin, power=1) > fit_r2(x, lin, power=2) - 1e-9
    assert fit_r2(x, quad, power=2) > fit_r2(x, quad, power=1)
    assert fit_r2(x, quad, power=2) > 0.999999


def test_candidate_outlier_set_rate():
    scene = generate_scene(SceneSpec(n_landmarks=30, rng_seed=4))
    cands = candidate_outlier_set(scene, outlier_rate=0.3, rng_seed=8)
    gt = set(scene.gt_correspondences)
    pairs = [(c.map_index, c.obs_index) for c in cands]
    assert len(set(pairs)) == len(pairs)
    n_in = sum(p in gt for p in pairs)
    n_out = len(pairs) - n_in
    assert n_in == len(gt)  # every true pair is present
    assert abs(n_out / len(pairs) - 0.3) < 0.05
    # outliers never silently duplicate a ground-truth association
    for c in cands:
        if (c.map_index, c.obs_index) not in gt:
            assert all(c.obs_index != o or c.map_index != m for m, o in gt)
