"""Closed-form weighted rigid alignment and hypothesis evaluation.

Solves min over (R, t) of sum_k w_k * ||map_k - (R @ obs_k + t)||^2 via
the weighted SVD construction (cross-covariance of centered points,
orthogonal projection with determinant repair). Weights combine a
similarity term with a completeness term that discounts partially
observed objects, whose centroids are biased by construction.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cliques import CliqueHypothesis
from .errors import DegenerateGeometry, InsufficientPairs, NoSolvableHypothesis
from .matching import Correspondence
from .scene import ObjectMap, ObservationSet, Pose

_RANK_RTOL = 1e-9


def completeness_weight(obs_axes, map_axes) -> float:
    """How fully an object was seen: ratio of axis norms, clamped to 1."""
    oa = np.asarray(obs_axes, dtype=np.float64)
    ma = np.asarray(map_axes, dtype=np.float64)
    if not np.all(ma > 0):
        raise ValueError("map axis lengths must be strictly positive")
    return min(1.0, math.sqrt(float(np.sum(oa * oa)) / float(np.sum(ma * ma))))


@dataclass(frozen=True)
class WeightedCorrespondenceSet:
    """Point pairs with per-pair similarity and completeness weights."""

    map_points: np.ndarray
    obs_points: np.ndarray
    w_sim: np.ndarray
    w_com: np.ndarray

    def __post_init__(self):
        mp = np.asarray(self.map_points, dtype=np.float64)
        op = np.asarray(self.obs_points, dtype=np.float64)
        ws = np.asarray(self.w_sim, dtype=np.float64)
        wc = np.asarray(self.w_com, dtype=np.float64)
        n = mp.shape[0]
        if mp.shape != (n, 3) or op.shape != (n, 3):
            raise ValueError("points must be (n, 3)")
        if ws.shape != (n,) or wc.shape != (n,):
            raise ValueError("weights must be (n,)")
        if (ws < 0).any():
            raise ValueError("w_sim must be non-negative")
        if ((wc <= 0) | (wc > 1)).any():
            raise ValueError("w_com must lie in (0, 1]")
        for a in (mp, op, ws, wc):
            a.setflags(write=False)
        object.__setattr__(self, "map_points", mp)
        object.__setattr__(self, "obs_points", op)
        object.__setattr__(self, "w_sim", ws)
        object.__setattr__(self, "w_com", wc)

    def __len__(self) -> int:
        return self.map_points.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self.w_sim * self.w_com


@dataclass(frozen=True)
class PoseEstimate:
    pose: Pose
    weighted_rms_residual: float
    hypothesis_score: float


def objective(pose: Pose, cset: WeightedCorrespondenceSet) -> float:
    """The weighted least-squares cost the solver minimizes."""
    pred = cset.obs_points @ pose.rotation.T + pose.translation
    return float(np.sum(cset.weights * np.sum((cset.map_points - pred) ** 2, axis=1)))


def solve_weighted_pose(cset: WeightedCorrespondenceSet,
                        hypothesis_score: float = 0.0) -> PoseEstimate:
    """Weighted rigid alignment, exact in the noiseless case.

    Raises InsufficientPairs when fewer than 3 pairs carry positive
    weight, DegenerateGeometry when either weighted point set is
    collinear (rotation about the common line is unobservable).
    """
    w = cset.weights
    active = w > 0
    if int(active.sum()) < 3:
        raise InsufficientPairs(f"{int(active.sum())} positive-weight pairs, need 3")
    mp = cset.map_points[active]
    op = cset.obs_points[active]
    wa = w[active]
    total = wa.sum()

    mu_map = wa @ mp / total
    mu_obs = wa @ op / total
    mc = mp - mu_map
    oc = op - mu_obs

    scale = np.sqrt(wa)[:, None]
    for pts, side in ((mc * scale, "map"), (oc * scale, "obs")):
        sv = np.linalg.svd(pts, compute_uv=False)
        if sv[0] <= 0 or np.sum(sv > sv[0] * _RANK_RTOL) < 2:
            raise DegenerateGeometry(f"{side} points are collinear under the given weights")

    h = (oc * wa[:, None]).T @ mc
    u, _, vt = np.linalg.svd(h)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    rotation = v @ np.diag([1.0, 1.0, d]) @ u.T
    translation = mu_map - rotation @ mu_obs

    pose = Pose(rotation, translation)
    pred = op @ rotation.T + translation
    rms = math.sqrt(float(np.sum(wa * np.sum((mp - pred) ** 2, axis=1)) / total))
    return PoseEstimate(pose, rms, hypothesis_score)


def correspondence_set(members, cands: list[Correspondence], omap: ObjectMap,
                       obs: ObservationSet, weights: str = "both") -> WeightedCorrespondenceSet:
    """Assemble the weighted pairs for one hypothesis.

    `weights` selects which factors participate: none, sim, com, both.
    Similarity weights clamp below at zero so an anti-correlated pair
    cannot flip its residual's sign in the objective.
    """
    if weights not in ("none", "sim", "com", "both"):
        raise ValueError(f"unknown weights mode {weights!r}")
    picked = [cands[i] for i in members]
    mp = np.array([omap.landmarks[c.map_index].position for c in picked])
    op = np.array([obs.objects[c.obs_index].position for c in picked])
    if weights in ("sim", "both"):
        ws = np.array([max(c.similarity, 0.0) for c in picked])
    else:
        ws = np.ones(len(picked))
    if weights in ("com", "both"):
        wc = np.array([
            completeness_weight(obs.objects[c.obs_index].axis_lengths,
                                omap.landmarks[c.map_index].axis_lengths)
            for c in picked])
    else:
        wc = np.ones(len(picked))
    return WeightedCorrespondenceSet(mp, op, ws, wc)


def _thread_count() -> int:
    raw = os.environ.get("SEMLOC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def evaluate_hypotheses(hyps: list[CliqueHypothesis], cands: list[Correspondence],
                        omap: ObjectMap, obs: ObservationSet,
                        weights: str = "both"
                        ) -> tuple[list[PoseEstimate], list[CliqueHypothesis], list[str]]:
    """Solve every hypothesis, keeping the clique ranking order.

    Returns (estimates, solved, notes): `solved` lists the source
    hypothesis of each estimate, and unsolvable hypotheses are dropped
    with a note; all failing raises NoSolvableHypothesis. Evaluation may
    fan out over a thread pool (SEMLOC_THREADS) and collects results in
    submission order, so the output never depends on scheduling.
    """

    def solve(h: CliqueHypothesis):
        try:
            cset = correspondence_set(h.member_indices, cands, omap, obs, weights)
            return solve_weighted_pose(cset, h.score), None
        except (DegenerateGeometry, InsufficientPairs) as exc:
            return None, f"hypothesis {h.member_indices}: {exc}"

    threads = _thread_count()
    if threads > 1 and len(hyps) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, hyps))
    else:
        results = [solve(h) for h in hyps]

    estimates = [est for est, _ in results if est is not None]
    solved = [h for h, (est, _) in zip(hyps, results) if est is not None]
    notes = [note for _, note in results if note is not None]
    if hyps and not estimates:
        raise NoSolvableHypothesis(f"all {len(hyps)} hypotheses degenerate")
    return estimates, solved, notes
