"""Synthetic scenes, corruption models, evaluation metrics, ablation
sweeps, and the scalability benchmark.

Scenes place ellipsoidal landmarks in loose clusters (objects come in
furniture-like groups, which gives the proximity graph real structure)
inside a bounding cube, with a minimum pairwise separation so that no
two landmarks are interchangeable under the compatibility tolerance.
Observations are a rigid transform of a landmark subset with optional
position noise, label corruption, partial-observation shrinkage (which
also biases the observed centroid and degrades the embedding, the way a
clipped detection would), and a duplicated landmark cluster that makes
the scene deliberately multi-modal.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .descriptors import EmbeddingTable
from .errors import EmptyHypothesisSet, NoConsensus, NoSolvableHypothesis
from .geometry import random_rotation, rotation_angle
from .matching import Correspondence
from .pipeline import PipelineConfig, localize
from .scene import EllipsoidLandmark, ObjectMap, ObservationSet, Pose

SUCCESS_TE_THRESHOLD = 1.0
MIN_SEPARATION = 0.4
CLUSTER_SPREAD = 0.45


@dataclass(frozen=True)
class SceneSpec:
    """Knobs for one synthetic scene; every rate lives in [0, 1]."""

    n_landmarks: int = 30
    extent: float = 10.0
    n_classes: int = 8
    embedding_dim: int = 32
    position_noise_sigma: float = 0.0
    label_corruption_rate: float = 0.0
    dropout_rate: float = 0.0
    partial_observation_rate: float = 0.0
    duplicate_cluster: int | None = None
    rng_seed: int = 0
    # second-order texture: spread of instance embeddings around their
    # class prototype, observation-side embedding jitter, and the extra
    # jitter plus centroid bias applied to partially observed objects
    embedding_noise: float = 0.15
    obs_embedding_noise: float = 0.0
    partial_embedding_noise: float = 0.3
    partial_offset_scale: float = 0.5

    def __post_init__(self):
        for name in ("label_corruption_rate", "dropout_rate", "partial_observation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.n_landmarks < 4:
            raise ValueError("n_landmarks must be >= 4")
        if self.duplicate_cluster is not None and not 4 <= self.duplicate_cluster <= self.n_landmarks:
            raise ValueError("duplicate_cluster size must be in [4, n_landmarks]")


@dataclass(frozen=True)
class SyntheticScene:
    spec: SceneSpec
    omap: ObjectMap
    observations: ObservationSet
    embeddings: EmbeddingTable
    gt_pose: Pose
    gt_correspondences: tuple[tuple[int, int], ...]
    pose_modes: tuple[Pose, ...]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _clustered_positions(rng, n: int, extent: float) -> np.ndarray:
    n_clusters = max(1, n // 5)
    centers = rng.uniform(0.0, extent, (n_clusters, 3))
    placed: list[np.ndarray] = []
    for _ in range(n):
        while True:
            center = centers[rng.integers(n_clusters)]
            p = center + rng.normal(0.0, CLUSTER_SPREAD, 3)
            if all(np.linalg.norm(p - q) >= MIN_SEPARATION for q in placed):
                placed.append(p)
                break
    return np.array(placed)


def generate_scene(spec: SceneSpec) -> SyntheticScene:
    """Deterministic scene synthesis; equal specs give equal scenes."""
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.n_landmarks

    positions = _clustered_positions(rng, n, spec.extent)
    classes = rng.integers(0, spec.n_classes, n)
    prototypes = rng.normal(size=(spec.n_classes, spec.embedding_dim))
    prototypes /= np.linalg.norm(prototypes, axis=1, keepdims=True)
    inst_emb = np.array([
        _unit(prototypes[classes[i]] + spec.embedding_noise * rng.normal(size=spec.embedding_dim))
        for i in range(n)])
    orientations = [random_rotation(rng) for _ in range(n)]
    axis_lengths = rng.uniform(0.3, 1.2, (n, 3))

    rotation_gt = random_rotation(rng)
    translation_gt = rng.uniform(0.0, spec.extent, 3)
    gt_pose = Pose(rotation_gt, translation_gt)
    pose_modes = [gt_pose]

    # duplicated cluster: a spatial neighbourhood copied far away with
    # near-identical appearance, creating a genuine second pose mode
    dup_sources: list[int] = []
    dup_positions = dup_emb = None
    if spec.duplicate_cluster is not None:
        size = spec.duplicate_cluster
        anchor = int(rng.integers(n))
        by_dist = np.argsort(np.linalg.norm(positions - positions[anchor], axis=1),
                             kind="stable")
        dup_sources = sorted(int(i) for i in by_dist[:size])
        shift = _unit(rng.normal(size=3)) * 3.0 * spec.extent
        dup_positions = positions[dup_sources] + shift
        dup_emb = np.array([
            _unit(inst_emb[i] + 0.02 * rng.normal(size=spec.embedding_dim))
            for i in dup_sources])
        pose_modes.append(Pose(rotation_gt, translation_gt + shift))

    n_map = n + len(dup_sources)
    map_landmarks = [
        EllipsoidLandmark(positions[i], orientations[i], axis_lengths[i],
                          int(classes[i]), embedding_id=i)
        for i in range(n)]
    emb_ids = list(range(n))
    emb_rows = [inst_emb[i] for i in range(n)]
    for j, src in enumerate(dup_sources):
        map_landmarks.append(EllipsoidLandmark(
            dup_positions[j], orientations[src], axis_lengths[src],
            int(classes[src]), embedding_id=n + j))
        emb_ids.append(n + j)
        emb_rows.append(dup_emb[j])

    if dup_sources:
        observed = list(dup_sources)
    else:
        n_obs = max(4, n - int(round(n * spec.dropout_rate)))
        observed = sorted(int(i) for i in rng.choice(n, n_obs, replace=False))

    n_partial = int(round(len(observed) * spec.partial_observation_rate))
    partial_set = set(
        int(i) for i in rng.choice(len(observed), n_partial, replace=False)) if n_partial else set()

    objects = []
    gt_corrs = []
    for j, i in enumerate(observed):
        obs_pos = rotation_gt.T @ (positions[i] - translation_gt)
        if spec.position_noise_sigma > 0:
            obs_pos = obs_pos + spec.position_noise_sigma * rng.normal(size=3)
        obs_axes = axis_lengths[i]
        emb = inst_emb[i]
        if j in partial_set:
            shrink = rng.uniform(0.35, 0.75)
            obs_axes = shrink * obs_axes
            bias = (1.0 - shrink) * float(np.linalg.norm(axis_lengths[i])) * spec.partial_offset_scale
            obs_pos = obs_pos + bias * _unit(rng.normal(size=3))
            emb = _unit(emb + spec.partial_embedding_noise * rng.normal(size=spec.embedding_dim))
        cls = int(classes[i])
        if spec.label_corruption_rate > 0 and rng.random() < spec.label_corruption_rate:
            cls = int((cls + 1 + rng.integers(spec.n_classes - 1)) % spec.n_classes)
            emb = _unit(prototypes[cls] + spec.embedding_noise * rng.normal(size=spec.embedding_dim))
        elif spec.obs_embedding_noise > 0:
            emb = _unit(emb + spec.obs_embedding_noise * rng.normal(size=spec.embedding_dim))
        objects.append(EllipsoidLandmark(
            obs_pos, rotation_gt.T @ orientations[i], obs_axes, cls,
            embedding_id=n_map + j))
        emb_ids.append(n_map + j)
        emb_rows.append(emb)
        gt_corrs.append((i, j))

    table = EmbeddingTable(emb_ids, np.array(emb_rows))
    return SyntheticScene(
        spec=spec,
        omap=ObjectMap(tuple(map_landmarks)),
        observations=ObservationSet(tuple(objects), source_pose_gt=gt_pose),
        embeddings=table,
        gt_pose=gt_pose,
        gt_correspondences=tuple(gt_corrs),
        pose_modes=tuple(pose_modes),
    )


def tile_scene(scene: SyntheticScene, n_landmarks: int) -> SyntheticScene:
    """Grow a scene by duplicating its landmarks in shifted tiles until
    the map reaches n_landmarks; the observation side is untouched."""
    base = scene.omap.landmarks
    n = len(base)
    if n_landmarks < n:
        raise ValueError("cannot shrink a scene by tiling")
    copies = math.ceil(n_landmarks / n)
    landmarks = list(base)
    emb_ids = list(scene.embeddings.ids)
    emb_rows = [scene.embeddings.get(i) for i in emb_ids]
    spacing = 2.5 * scene.spec.extent
    for c in range(1, copies):
        shift = np.array([spacing * c, 0.0, 0.0])
        for lm in base:
            if len(landmarks) >= n_landmarks:
                break
            new_id = len(landmarks)
            landmarks.append(EllipsoidLandmark(
                lm.position + shift, lm.orientation, lm.axis_lengths,
                lm.class_id, embedding_id=new_id))
            emb_ids.append(new_id)
            emb_rows.append(scene.embeddings.get(lm.embedding_id))
    # observation embedding ids moved: they sat right after the original map
    offset = len(landmarks) - n
    objects = []
    for lm in scene.observations.objects:
        new_id = lm.embedding_id + offset
        emb_ids.append(new_id)
        emb_rows.append(scene.embeddings.get(lm.embedding_id))
        objects.append(EllipsoidLandmark(lm.position, lm.orientation, lm.axis_lengths,
                                         lm.class_id, embedding_id=new_id))
    seen = {}
    for i, row in zip(emb_ids, emb_rows):
        seen[i] = row
    table = EmbeddingTable(sorted(seen), np.array([seen[i] for i in sorted(seen)]))
    return replace(scene,
                   spec=replace(scene.spec, n_landmarks=len(landmarks)),
                   omap=ObjectMap(tuple(landmarks)),
                   observations=ObservationSet(tuple(objects), scene.gt_pose),
                   embeddings=table)


@dataclass(frozen=True)
class MatchingScore:
    precision: float
    recall: float
    empty_prediction: bool = False


def evaluate_matching(pred, gt) -> MatchingScore:
    """Precision/recall (percent) of a correspondence set against ground
    truth; an empty prediction reports precision 0 with a flag rather
    than dividing by zero."""
    gt_set = {(int(m), int(n)) for m, n in gt}
    if not gt_set:
        raise ValueError("ground-truth correspondence set must be non-empty")
    pairs = set()
    for item in pred:
        if isinstance(item, Correspondence):
            pairs.add((item.map_index, item.obs_index))
        else:
            m, n = item
            pairs.add((int(m), int(n)))
    if not pairs:
        return MatchingScore(0.0, 0.0, empty_prediction=True)
    hit = len(pairs & gt_set)
    return MatchingScore(100.0 * hit / len(pairs), 100.0 * hit / len(gt_set))


@dataclass(frozen=True)
class PoseEval:
    te_per_rank: tuple[float, ...]
    rotation_error: float
    threshold: float = SUCCESS_TE_THRESHOLD

    @property
    def translation_error(self) -> float:
        return self.te_per_rank[0]

    def success_at(self, n: int) -> bool:
        return any(te < self.threshold for te in self.te_per_rank[:n])


def evaluate_pose(estimates, gt: Pose, threshold: float = SUCCESS_TE_THRESHOLD) -> PoseEval:
    """Rank-1 errors plus per-rank success against the TE threshold."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if not estimates:
        raise ValueError("need at least one estimate")
    tes = tuple(float(np.linalg.norm(e.pose.translation - gt.translation))
                for e in estimates)
    re = rotation_angle(estimates[0].pose.rotation.T @ gt.rotation)
    return PoseEval(tes, re, threshold)


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    translation_error: float
    rotation_error: float
    success_rate_top1: float
    success_rate_top3: float
    success_rate_top5: float
    mean_latency: float
    n_scenes: int = 0
    n_failed: int = 0

    FIELDS = ("precision", "recall", "translation_error", "rotation_error",
              "success_rate_top1", "success_rate_top3", "success_rate_top5",
              "mean_latency", "n_scenes", "n_failed")

    def row(self) -> list:
        return [getattr(self, f) for f in self.FIELDS]


@dataclass(frozen=True)
class SceneOutcome:
    matching: MatchingScore | None
    pose: PoseEval | None
    latency: float
    failure: str | None = None


def run_scene(scene: SyntheticScene, config: PipelineConfig) -> SceneOutcome:
    """Localize one scene and score it; no-solution errors count as a
    failed scene instead of propagating."""
    start = time.perf_counter()
    try:
        result = localize(scene.omap, scene.observations, scene.embeddings, config)
    except (EmptyHypothesisSet, NoConsensus, NoSolvableHypothesis) as exc:
        return SceneOutcome(None, None, time.perf_counter() - start, failure=str(exc))
    latency = time.perf_counter() - start
    match = evaluate_matching(result.inlier_correspondences(), scene.gt_correspondences)
    pe = evaluate_pose(result.estimates, scene.gt_pose)
    return SceneOutcome(match, pe, latency)


def aggregate(outcomes) -> EvalReport:
    """Mean metrics over scenes; error means skip failed scenes, success
    rates count them as misses."""
    outcomes = list(outcomes)
    n = len(outcomes)
    ok = [o for o in outcomes if o.failure is None]
    failed = n - len(ok)

    def mean(vals):
        vals = list(vals)
        return float(np.mean(vals)) if vals else float("nan")

    return EvalReport(
        precision=mean(o.matching.precision for o in ok),
        recall=mean(o.matching.recall for o in ok),
        translation_error=mean(o.pose.translation_error for o in ok),
        rotation_error=mean(o.pose.rotation_error for o in ok),
        success_rate_top1=100.0 * sum(o.pose.success_at(1) for o in ok) / n if n else 0.0,
        success_rate_top3=100.0 * sum(o.pose.success_at(3) for o in ok) / n if n else 0.0,
        success_rate_top5=100.0 * sum(o.pose.success_at(5) for o in ok) / n if n else 0.0,
        mean_latency=mean(o.latency for o in ok),
        n_scenes=n,
        n_failed=failed,
    )


def run_suite(spec: SceneSpec, config: PipelineConfig, n_scenes: int,
              seed: int = 0) -> EvalReport:
    """One spec, many scenes: scene i uses rng_seed = seed + i."""
    outcomes = [run_scene(generate_scene(replace(spec, rng_seed=seed + i)), config)
                for i in range(n_scenes)]
    return aggregate(outcomes)


def run_ablation(axis: str, spec: SceneSpec, config: PipelineConfig,
                 n_scenes: int, seed: int = 0) -> list[tuple[str, EvalReport]]:
    """Sweep one configuration axis with shared scene seeds.

    Axes: weights, matching, extractor, alpha. Stochastic extractors
    report their best of three differently seeded trials, mirroring how
    such methods are usually given their best shot.
    """
    rows: list[tuple[str, EvalReport]] = []
    if axis == "weights":
        for mode in ("none", "sim", "com", "both"):
            rows.append((mode, run_suite(spec, replace(config, weights=mode), n_scenes, seed)))
    elif axis == "matching":
        for strat in ("one_to_one", "knn", "adaptive"):
            rows.append((strat, run_suite(spec, replace(config, matching=strat), n_scenes, seed)))
    elif axis == "alpha":
        for alpha in [round(0.1 * i, 1) for i in range(11)]:
            rows.append((str(alpha), run_suite(spec, replace(config, alpha=alpha), n_scenes, seed)))
    elif axis == "extractor":
        for extractor in ("clique", "ransac", "prosac"):
            best = None
            trials = 1 if extractor == "clique" else 3
            for trial in range(trials):
                report = run_suite(
                    spec, replace(config, extractor=extractor, seed=config.seed + trial),
                    n_scenes, seed)
                if best is None or report.success_rate_top1 > best.success_rate_top1:
                    best = report
            rows.append((extractor, best))
    else:
        raise ValueError(f"unknown ablation axis {axis!r}")
    return rows


def benchmark_scalability(sizes, spec: SceneSpec, config: PipelineConfig,
                          repeats: int = 5, seed: int = 0) -> list[dict]:
    """Latency of the full pipeline on maps tiled up to each size."""
    base = generate_scene(replace(spec, rng_seed=seed))
    rows = []
    for size in sizes:
        scene = tile_scene(base, size)
        times = []
        for _ in range(repeats):
            start = time.perf_counter()
            localize(scene.omap, scene.observations, scene.embeddings, config)
            times.append(time.perf_counter() - start)
        rows.append({"n_landmarks": size,
                     "median_latency": float(np.median(times)),
                     "mean_latency": float(np.mean(times)),
                     "min_latency": float(np.min(times))})
    return rows


def fit_r2(sizes, latencies, power: int) -> float:
    """Goodness of fit of latency against size**power (with intercept).

    Linear and quadratic growth are separated by comparing disjoint
    one-regressor models rather than nested polynomials, whose R² would
    be trivially ordered.
    """
    x = np.asarray(sizes, dtype=np.float64) ** power
    y = np.asarray(latencies, dtype=np.float64)
    a = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    pred = a @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def candidate_outlier_set(scene: SyntheticScene, outlier_rate: float,
                          rng_seed: int = 0,
                          inlier_sim: tuple[float, float] = (0.55, 0.95),
                          outlier_sim: tuple[float, float] = (0.30, 0.80)) -> list[Correspondence]:
    """Ground-truth pairs plus injected wrong pairs at the given rate.

    Bypasses descriptor matching so extractor robustness can be measured
    on a controlled contamination level; similarity ranges overlap so a
    similarity ordering is informative but not clairvoyant.
    """
    if not 0.0 <= outlier_rate < 1.0:
        raise ValueError("outlier_rate must be in [0, 1)")
    rng = np.random.default_rng(rng_seed)
    true_pairs = list(scene.gt_correspondences)
    cands = [Correspondence(m, n, float(rng.uniform(*inlier_sim))) for m, n in true_pairs]
    gt_map = dict((n, m) for m, n in true_pairs)
    n_out = int(round(len(cands) * outlier_rate / (1.0 - outlier_rate)))
    used = set((c.map_index, c.obs_index) for c in cands)
    n_map = len(scene.omap)
    n_obs = len(scene.observations)
    while n_out > 0:
        m = int(rng.integers(n_map))
        n = int(rng.integers(n_obs))
        if gt_map.get(n) == m or (m, n) in used:
            continue
        used.add((m, n))
        cands.append(Correspondence(m, n, float(rng.uniform(*outlier_sim))))
        n_out -= 1
    order = sorted(range(len(cands)), key=lambda i: (cands[i].map_index, cands[i].obs_index))
    return [cands[i] for i in order]
