"""Core domain types: ellipsoidal landmarks, maps, observations, poses.

Landmarks are ellipsoids described by a center position, an orientation
matrix, and three half-axis lengths. Note the half-length convention:
``fit_ellipsoid`` on a unit cube yields axis lengths of 0.5. Downstream
completeness weighting depends only on the obs/map ratio, so the
convention is isolated here.

All types are immutable value objects (frozen dataclasses over read-only
arrays) and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCloud
from .geometry import ROTATION_TOL

_EIGENVALUE_TIE_RTOL = 1e-9


def _frozen(a: np.ndarray, shape: tuple[int, ...], name: str) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    if out.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite")
    out.setflags(write=False)
    return out


def _check_rotation(m: np.ndarray, name: str) -> None:
    if np.abs(m.T @ m - np.eye(3)).max() > ROTATION_TOL:
        raise ValueError(f"{name} is not orthonormal")
    if abs(np.linalg.det(m) - 1.0) > ROTATION_TOL:
        raise ValueError(f"{name} must have determinant +1")


@dataclass(frozen=True)
class Pose:
    """Rigid transform: camera-frame point p maps to rotation @ p + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _frozen(self.rotation, (3, 3), "rotation"))
        object.__setattr__(self, "translation", _frozen(self.translation, (3,), "translation"))
        _check_rotation(self.rotation, "rotation")

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class EllipsoidLandmark:
    """One ellipsoidal object: center, orientation, half-axis lengths,
    category, and optional free-form text label / embedding reference."""

    position: np.ndarray
    orientation: np.ndarray
    axis_lengths: np.ndarray
    class_id: int
    text_label: str | None = None
    embedding_id: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", _frozen(self.position, (3,), "position"))
        object.__setattr__(self, "orientation", _frozen(self.orientation, (3, 3), "orientation"))
        object.__setattr__(self, "axis_lengths", _frozen(self.axis_lengths, (3,), "axis_lengths"))
        _check_rotation(self.orientation, "orientation")
        if not np.all(self.axis_lengths > 0):
            raise ValueError("axis_lengths must be strictly positive")


@dataclass(frozen=True)
class ObjectMap:
    """Prior map: an ordered list of landmarks. Indices are stable identifiers."""

    landmarks: tuple[EllipsoidLandmark, ...]
    frame_id: str = "map"

    def __post_init__(self):
        object.__setattr__(self, "landmarks", tuple(self.landmarks))

    def __len__(self) -> int:
        return len(self.landmarks)

    def positions(self) -> np.ndarray:
        return np.array([lm.position for lm in self.landmarks])


@dataclass(frozen=True)
class ObservationSet:
    """Objects observed in a single frame, expressed in the camera frame.

    `source_pose_gt` optionally carries the ground-truth camera pose for
    evaluation; it never participates in localization itself.
    """

    objects: tuple[EllipsoidLandmark, ...]
    source_pose_gt: Pose | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))

    def __len__(self) -> int:
        return len(self.objects)

    def positions(self) -> np.ndarray:
        return np.array([lm.position for lm in self.objects])


def _canonical_eigenbasis(eigvals: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    """Deterministic right-handed frame from an eigendecomposition.

    Columns come in descending-eigenvalue order. Within groups of (near)
    tied eigenvalues any basis is valid, so we pick the column permutation
    best aligned with the world axes, make each column's dominant
    component positive, and repair handedness on the last column.
    """
    order = np.argsort(-eigvals, kind="stable")
    vals = eigvals[order]
    vecs = eigvecs[:, order]

    # group indices of tied eigenvalues
    scale = max(float(vals[0]), 1e-300)
    groups: list[list[int]] = [[0]]
    for i in range(1, 3):
        if vals[i - 1] - vals[i] <= _EIGENVALUE_TIE_RTOL * scale:
            groups[-1].append(i)
        else:
            groups.append([i])

    from itertools import permutations

    for group in groups:
        if len(group) == 1:
            continue
        cols = vecs[:, group]
        best, best_perm = -1.0, tuple(range(len(group)))
        for perm in permutations(range(len(group))):
            score = sum(abs(cols[group[i], perm[i]]) for i in range(len(group)))
            if score > best + 1e-15:
                best, best_perm = score, perm
        vecs[:, group] = cols[:, best_perm]

    for i in range(3):
        if vecs[np.argmax(np.abs(vecs[:, i])), i] < 0:
            vecs[:, i] = -vecs[:, i]
    if np.linalg.det(vecs) < 0:
        vecs[:, 2] = -vecs[:, 2]
    return vecs


def fit_ellipsoid(points, class_id: int = 0, text_label: str | None = None,
                  embedding_id: int | None = None) -> EllipsoidLandmark:
    """Fit an oriented ellipsoid to a 3D point cloud.

    The frame comes from a principal component analysis of the cloud: the
    orientation columns are covariance eigenvectors (descending
    eigenvalue), the position is the centroid, and each axis length is
    the half-extent of the points projected onto that eigenvector.

    Raises
    ------
    DegenerateCloud
        If fewer than 4 points are given or the cloud is rank-deficient
        (collinear or coplanar), in which case the observation should be
        dropped.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be an (N, 3) array")
    if pts.shape[0] < 4:
        raise DegenerateCloud(f"need at least 4 points, got {pts.shape[0]}")

    centroid = pts.mean(axis=0)
    centered = pts - centroid

    singular = np.linalg.svd(centered, compute_uv=False)
    if singular[0] <= 0 or np.sum(singular > singular[0] * 1e-9) < 3:
        raise DegenerateCloud("points are collinear or coplanar")

    cov = centered.T @ centered / pts.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    basis = _canonical_eigenbasis(eigvals, eigvecs)

    proj = centered @ basis
    half_extents = (proj.max(axis=0) - proj.min(axis=0)) / 2.0

    return EllipsoidLandmark(
        position=centroid,
        orientation=basis,
        axis_lengths=half_extents,
        class_id=class_id,
        text_label=text_label,
        embedding_id=embedding_id,
    )
