"""Rigid poses in the plane and in space.

A pose maps the moving part's local frame to the world: ``x -> R x + t``.
The moving part is built with its centroid at the local origin, so ``t`` is
the world position of the centroid and rotations turn the part about it.
Quaternions are stored scalar-first, ``(w, x, y, z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

QUAT_TOL = 1e-9


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = np.linalg.norm(q)
    if n == 0:
        raise ValueError("zero quaternion")
    q = q / n
    # canonical hemisphere so equal rotations compare equal
    return -q if q[0] < 0 else q


def _to_scipy(q):
    return Rotation.from_quat([q[1], q[2], q[3], q[0]])


def _from_scipy(r: Rotation) -> np.ndarray:
    x, y, z, w = r.as_quat()
    return quat_normalize([w, x, y, z])


def quat_to_matrix(q) -> np.ndarray:
    return _to_scipy(quat_normalize(q)).as_matrix()


def quat_mul(a, b) -> np.ndarray:
    return _from_scipy(_to_scipy(a) * _to_scipy(b))


def quat_from_rotvec(v) -> np.ndarray:
    return _from_scipy(Rotation.from_rotvec(v))


def quat_angle(a, b) -> float:
    """Geodesic distance between two rotations, in radians."""
    d = abs(float(np.dot(quat_normalize(a), quat_normalize(b))))
    return 2.0 * math.acos(min(1.0, d))


def rot2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def wrap_angle(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class Pose:
    """Rigid transformation: ``theta`` (2D, right-handed about +z) or unit quaternion (3D)."""

    translation: np.ndarray
    rotation: object  # float angle in 2D, quaternion array in 3D

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=np.float64).copy()
        object.__setattr__(self, "translation", t)
        if t.shape == (2,):
            object.__setattr__(self, "rotation", float(self.rotation))
        elif t.shape == (3,):
            q = np.asarray(self.rotation, dtype=np.float64)
            if q.shape != (4,) or abs(np.linalg.norm(q) - 1.0) > 1e-6:
                raise ValueError("3D poses need a unit quaternion (w, x, y, z)")
            object.__setattr__(self, "rotation", quat_normalize(q))
        else:
            raise ValueError("translation must have 2 or 3 components")

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Pose":
        if dim == 2:
            return cls(np.zeros(2), 0.0)
        return cls(np.zeros(3), np.array([1.0, 0, 0, 0]))

    @classmethod
    def from_vector(cls, v) -> "Pose":
        """``(x, y, theta)`` or ``(tx, ty, tz, qw, qx, qy, qz)``."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape == (3,):
            return cls(v[:2], v[2])
        if v.shape == (7,):
            return cls(v[:3], quat_normalize(v[3:]))
        raise ValueError("pose vectors have 3 (2D) or 7 (3D) entries")

    def as_vector(self) -> np.ndarray:
        if self.dim == 2:
            return np.array([*self.translation, self.rotation])
        return np.concatenate([self.translation, self.rotation])

    def matrix(self) -> np.ndarray:
        return rot2(self.rotation) if self.dim == 2 else quat_to_matrix(self.rotation)

    def apply(self, pts) -> np.ndarray:
        return np.asarray(pts, dtype=np.float64) @ self.matrix().T + self.translation

    def apply_inverse(self, pts) -> np.ndarray:
        return (np.asarray(pts, dtype=np.float64) - self.translation) @ self.matrix()

    def inverse(self) -> "Pose":
        R = self.matrix()
        t = -R.T @ self.translation
        if self.dim == 2:
            return Pose(t, -self.rotation)
        w, x, y, z = self.rotation
        return Pose(t, np.array([w, -x, -y, -z]))

    def compose(self, other: "Pose") -> "Pose":
        """``self * other``: apply ``other`` first."""
        t = self.matrix() @ other.translation + self.translation
        if self.dim == 2:
            return Pose(t, self.rotation + other.rotation)
        return Pose(t, quat_mul(self.rotation, other.rotation))

    def perturbed(self, k: int, delta: float) -> "Pose":
        """Step ``delta`` along generalized coordinate k.

        Coordinates are the translation axes followed by the rotation: the
        angle in 2D, body-frame axis-angle components in 3D.
        """
        d = self.dim
        if k < d:
            t = self.translation.copy()
            t[k] += delta
            return Pose(t, self.rotation)
        if d == 2:
            return Pose(self.translation, self.rotation + delta)
        v = np.zeros(3)
        v[k - 3] = delta
        return Pose(self.translation, quat_mul(self.rotation, quat_from_rotvec(v)))

    def stepped(self, step) -> "Pose":
        """Move by a generalized-coordinate vector (translation, rotation increment)."""
        step = np.asarray(step, dtype=np.float64)
        d = self.dim
        t = self.translation + step[:d]
        if d == 2:
            return Pose(t, self.rotation + step[2])
        return Pose(t, quat_mul(self.rotation, quat_from_rotvec(step[3:6])))


def n_dof(dim: int) -> int:
    return 3 if dim == 2 else 6


def translation_error(a: Pose, b: Pose) -> float:
    return float(np.linalg.norm(a.translation - b.translation))


def rotation_error(a: Pose, b: Pose) -> float:
    """Geodesic rotation distance in radians."""
    if a.dim == 2:
        return abs(wrap_angle(a.rotation - b.rotation))
    return quat_angle(a.rotation, b.rotation)
