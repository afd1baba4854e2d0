"""Sample-consensus inlier extractors (RANSAC and PROSAC) used as
comparison baselines for the clique pipeline.

Both hypothesize poses from minimal 3-pair samples and keep the sample
with the largest consensus. PROSAC differs only in where samples come
from: a pool that starts as the highest-similarity candidates and grows
toward the full set following the standard progressive schedule, so
good similarity rankings pay off in early iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, NoConsensus
from .matching import Correspondence
from .pose import PoseEstimate, WeightedCorrespondenceSet, solve_weighted_pose
from .scene import ObjectMap, ObservationSet


@dataclass(frozen=True)
class SacConfig:
    rng_seed: int
    max_iterations: int = 1000
    inlier_threshold: float = 0.3
    min_sample: int = 3

    def __post_init__(self):
        if self.max_iterations < 1 or self.inlier_threshold <= 0 or self.min_sample < 3:
            raise ValueError("SacConfig fields must be positive (min_sample >= 3)")


@dataclass(frozen=True)
class SacResult:
    inliers: tuple[int, ...]
    estimate: PoseEstimate
    found_iteration: int
    iterations_run: int


def _gather(cands, omap, obs):
    mp = np.array([omap.landmarks[c.map_index].position for c in cands])
    op = np.array([obs.objects[c.obs_index].position for c in cands])
    mi = np.array([c.map_index for c in cands])
    oi = np.array([c.obs_index for c in cands])
    return mp, op, mi, oi


def _fit(mp, op, score=0.0):
    ones = np.ones(mp.shape[0])
    return solve_weighted_pose(WeightedCorrespondenceSet(mp, op, ones, ones), score)


def _consensus_loop(cands, omap, obs, cfg, sampler):
    """Shared hypothesize-and-verify loop; `sampler(iteration)` yields
    candidate index triples."""
    mp, op, mi, oi = _gather(cands, omap, obs)
    best_mask = None
    best_count = 0
    found_at = -1
    for it in range(cfg.max_iterations):
        sample = sampler(it)
        if len({int(i) for i in mi[sample]}) < len(sample):
            continue
        if len({int(i) for i in oi[sample]}) < len(sample):
            continue
        try:
            est = _fit(mp[sample], op[sample])
        except DegenerateGeometry:
            continue
        pred = op @ est.pose.rotation.T + est.pose.translation
        residual = np.linalg.norm(mp - pred, axis=1)
        mask = residual < cfg.inlier_threshold
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_mask = mask
            found_at = it
    if best_count < 3:
        raise NoConsensus(f"best consensus {best_count} < 3 after {cfg.max_iterations} iterations")
    inliers = tuple(int(i) for i in np.flatnonzero(best_mask))
    score = float(sum(cands[i].similarity for i in inliers))
    final = _fit(mp[list(inliers)], op[list(inliers)], score)
    return SacResult(inliers, final, found_at, cfg.max_iterations)


def ransac_extract(cands: list[Correspondence], omap: ObjectMap,
                   obs: ObservationSet, cfg: SacConfig) -> SacResult:
    """Uniform random minimal samples over all candidates."""
    if len(cands) < cfg.min_sample:
        # consensus of >= min_sample is unreachable, same failure as sampling out
        raise NoConsensus(f"{len(cands)} candidates, need {cfg.min_sample}")
    rng = np.random.default_rng(cfg.rng_seed)
    n = len(cands)
    m = cfg.min_sample

    def sampler(_it):
        return rng.choice(n, size=m, replace=False)

    return _consensus_loop(cands, omap, obs, cfg, sampler)


def _prosac_pool_sizes(n: int, m: int, budget: int) -> list[int]:
    """Pool size per iteration under the standard growth schedule.

    T_n is the expected number of uniform samples drawn entirely from
    the top n candidates within the budget; the pool grows by one each
    time the iteration counter passes the T'_n milestone derived from
    the T_{n+1} = T_n * (n+1)/(n+1-m) recurrence.
    """
    t_n = float(budget)
    for i in range(m):
        t_n *= (m - i) / (n - i)
    sizes = []
    pool = m
    milestone = 1.0
    for it in range(1, budget + 1):
        while it > milestone and pool < n:
            t_next = t_n * (pool + 1) / (pool + 1 - m)
            milestone += math.ceil(t_next - t_n)
            t_n = t_next
            pool += 1
        sizes.append(pool)
    return sizes


def prosac_extract(cands: list[Correspondence], omap: ObjectMap,
                   obs: ObservationSet, cfg: SacConfig) -> SacResult:
    """Progressive sampling from the similarity-sorted candidate head.

    Inlier indices in the result refer to the original candidate order,
    so callers can treat this as a drop-in for ransac_extract.
    """
    if len(cands) < cfg.min_sample:
        # consensus of >= min_sample is unreachable, same failure as sampling out
        raise NoConsensus(f"{len(cands)} candidates, need {cfg.min_sample}")
    order = sorted(range(len(cands)), key=lambda i: (-cands[i].similarity, i))
    ranked = [cands[i] for i in order]
    rng = np.random.default_rng(cfg.rng_seed)
    n = len(cands)
    m = cfg.min_sample
    pool_sizes = _prosac_pool_sizes(n, m, cfg.max_iterations)

    def sampler(it):
        return rng.choice(pool_sizes[it], size=m, replace=False)

    res = _consensus_loop(ranked, omap, obs, cfg, sampler)
    back = tuple(sorted(order[i] for i in res.inliers))
    return SacResult(back, res.estimate, res.found_iteration, res.iterations_run)
