"""Small rotation helpers used across the package and its tests."""

from __future__ import annotations

import numpy as np

ROTATION_TOL = 1e-9


def is_rotation(matrix: np.ndarray, tol: float = ROTATION_TOL) -> bool:
    """True if `matrix` is orthonormal with determinant +1 within `tol`."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape != (3, 3):
        return False
    if not np.all(np.isfinite(m)):
        return False
    ortho = np.abs(m.T @ m - np.eye(3)).max()
    return ortho <= tol and abs(np.linalg.det(m) - 1.0) <= tol


def quaternion_to_matrix(q: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) to a 3x3 rotation matrix."""
    w, x, y, z = np.asarray(q, dtype=np.float64) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed random rotation (quaternion method)."""
    q = rng.normal(size=4)
    while np.linalg.norm(q) < 1e-12:
        q = rng.normal(size=4)
    return quaternion_to_matrix(q)


def rotation_angle(rotation: np.ndarray) -> float:
    """Geodesic angle of a rotation matrix, in radians."""
    r = np.asarray(rotation, dtype=np.float64)
    cos = (np.trace(r) - 1.0) / 2.0
    return float(np.arccos(np.clip(cos, -1.0, 1.0)))
