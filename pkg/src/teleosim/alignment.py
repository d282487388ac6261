"""Operator-frame to robot-base registration.

A set of paired points (the corners of the alignment square as seen in the
operator's world and measured at the robot) determines the rigid transform
mapping operator coordinates into the base frame. Solved in closed form via
SVD with the reflection branch rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfigurationError, NotAnchoredError, RegistrationError
from .geometry import IDENTITY_QUAT, Pose, quat_multiply, quat_normalize, quat_rotate

DEFAULT_MAX_RESIDUAL = 0.02  # m RMS; worse alignments degrade control, reject


@dataclass(frozen=True, eq=False)
class CorrespondenceSet:
    """Paired operator-frame / robot-frame points, row-aligned (N, 3) each."""

    operator_points: np.ndarray
    robot_points: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.operator_points, dtype=float)
        b = np.asarray(self.robot_points, dtype=float)
        if a.ndim != 2 or a.shape[1] != 3 or a.shape != b.shape:
            raise ValueError("correspondences must be matching (N, 3) arrays")
        if a.shape[0] < 3:
            raise ValueError(f"registration needs at least 3 pairs, got {a.shape[0]}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("correspondence points must be finite")
        object.__setattr__(self, "operator_points", a)
        object.__setattr__(self, "robot_points", b)

    @classmethod
    def from_pairs(cls, pairs) -> "CorrespondenceSet":
        pairs = list(pairs)
        return cls(
            np.array([p[0] for p in pairs], dtype=float),
            np.array([p[1] for p in pairs], dtype=float),
        )


@dataclass(frozen=True, eq=False)
class AnchorTransform:
    """Rigid operator-to-base transform plus its registration quality."""

    rotation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    anchored: bool = False
    residual: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rotation", quat_normalize(self.rotation))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @classmethod
    def unanchored(cls) -> "AnchorTransform":
        return cls(anchored=False)

    @classmethod
    def identity(cls) -> "AnchorTransform":
        """Anchored identity, for headless runs that skip visual alignment."""
        return cls(anchored=True)

    def as_pose(self) -> Pose:
        return Pose(self.translation, self.rotation)


def register(correspondences, max_residual: float = DEFAULT_MAX_RESIDUAL) -> AnchorTransform:
    """Least-squares rigid transform from operator points onto robot points.

    Returns the anchored transform minimizing the sum of squared pair
    distances, with det(R) = +1 enforced. Collinear or coincident operator
    points leave the rotation underdetermined and raise
    DegenerateConfigurationError; an RMS residual above `max_residual`
    raises RegistrationError.
    """
    if not isinstance(correspondences, CorrespondenceSet):
        correspondences = CorrespondenceSet.from_pairs(correspondences)
    a = correspondences.operator_points
    b = correspondences.robot_points

    ca = a.mean(axis=0)
    cb = b.mean(axis=0)
    a0 = a - ca
    b0 = b - cb

    spread = np.linalg.svd(a0, compute_uv=False)
    if spread[1] <= 1e-9 * max(spread[0], 1.0):
        raise DegenerateConfigurationError(
            "correspondence points are collinear; rotation is underdetermined"
        )

    h = a0.T @ b0
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    rot = vt.T @ np.diag([1.0, 1.0, d]) @ u.T

    t = cb - rot @ ca
    residual = float(np.sqrt(np.mean(np.sum((a @ rot.T + t - b) ** 2, axis=1))))
    if residual > max_residual:
        raise RegistrationError(residual, max_residual)

    return AnchorTransform(
        rotation=_quat_from_matrix(rot),
        translation=t,
        anchored=True,
        residual=residual,
    )


def apply(anchor: AnchorTransform, pose: Pose) -> Pose:
    """Re-express an operator-frame pose in the robot base frame."""
    if not anchor.anchored:
        raise NotAnchoredError("anchor transform has not been registered")
    return Pose(
        anchor.translation + quat_rotate(anchor.rotation, pose.position),
        quat_multiply(anchor.rotation, pose.orientation),
    )


def apply_point(anchor: AnchorTransform, point) -> np.ndarray:
    if not anchor.anchored:
        raise NotAnchoredError("anchor transform has not been registered")
    return anchor.translation + quat_rotate(anchor.rotation, np.asarray(point, dtype=float))


def _quat_from_matrix(m: np.ndarray) -> np.ndarray:
    """Shepperd's method: stable rotation-matrix to quaternion conversion."""
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
    return quat_normalize(np.array(q))
