"""Rigid-body geometry: unit quaternions, poses, and twists.

Quaternions are stored as (w, x, y, z) numpy arrays and kept unit-norm by
every constructor and operation. Rotation vectors (axis * angle) are the
canonical small-orientation-error representation used by the controller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Relative angles within this margin of pi take the shortest-arc branch
# with a deterministic axis sign (see quat_to_rotvec).
_PI_BRANCH_EPS = 1e-6


def vec3(x) -> np.ndarray:
    """Coerce to a finite float64 3-vector."""
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"expected 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    return v


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape != (4,):
        raise ValueError(f"expected quaternion (w,x,y,z), got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("quaternion has non-finite components")
    n = float(np.linalg.norm(q))
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero quaternion")
    return q / n


def quat_multiply(a, b) -> np.ndarray:
    """Hamilton product a * b, both (w,x,y,z)."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by quaternion q (q v q*)."""
    w = q[0]
    u = np.asarray(q[1:4], dtype=float)
    v = np.asarray(v, dtype=float)
    # Rodrigues-style expansion, cheaper than two Hamilton products.
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = vec3(axis)
    n = float(np.linalg.norm(axis))
    if n < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * float(angle)
    return np.concatenate(([math.cos(half)], math.sin(half) / n * axis))


def quat_from_rotvec(r) -> np.ndarray:
    r = vec3(r)
    angle = float(np.linalg.norm(r))
    if angle < 1e-12:
        # sin(a/2)/a ~ 1/2 - a^2/48
        return quat_normalize(np.concatenate(([1.0], 0.5 * r)))
    return np.concatenate(([math.cos(0.5 * angle)], math.sin(0.5 * angle) / angle * r))


def quat_to_rotvec(q) -> np.ndarray:
    """Rotation vector (axis * angle) of q, with angle in [0, pi].

    Near-pi rotations are resolved deterministically: the returned axis is
    the one whose (x, y, z) tuple compares lexicographically greater than
    its negation (first nonzero component positive).
    """
    q = np.asarray(q, dtype=float)
    if q[0] < 0.0:
        q = -q  # same rotation, shortest-arc branch
    sin_half = float(np.linalg.norm(q[1:4]))
    angle = 2.0 * math.atan2(sin_half, float(q[0]))
    if sin_half < 1e-12:
        # angle ~ 0; atan2(s, w)/s -> 1/w, keep first-order term for continuity
        return 2.0 * q[1:4] / float(q[0])
    axis = q[1:4] / sin_half
    if angle >= math.pi - _PI_BRANCH_EPS:
        axis = _canonical_axis_sign(axis)
        angle = min(angle, math.pi)
    return angle * axis


def _canonical_axis_sign(axis: np.ndarray) -> np.ndarray:
    for c in axis:
        if c > 0.0:
            return axis
        if c < 0.0:
            return -axis
    return axis


def quat_angle(q) -> float:
    """Rotation angle of q in [0, pi]."""
    q = np.asarray(q, dtype=float)
    return 2.0 * math.atan2(float(np.linalg.norm(q[1:4])), abs(float(q[0])))


IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform / frame: position in meters, orientation as a unit
    quaternion (w, x, y, z). Normalized on construction."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())

    def __post_init__(self):
        object.__setattr__(self, "position", vec3(self.position))
        object.__setattr__(self, "orientation", quat_normalize(self.orientation))

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    @classmethod
    def from_axis_angle(cls, position, axis, angle: float) -> "Pose":
        return cls(position, quat_from_axis_angle(axis, angle))

    def compose(self, other: "Pose") -> "Pose":
        """self then other in self's frame: T_self * T_other."""
        return Pose(
            self.position + quat_rotate(self.orientation, other.position),
            quat_multiply(self.orientation, other.orientation),
        )

    def inverse(self) -> "Pose":
        q_inv = quat_conjugate(self.orientation)
        return Pose(-quat_rotate(q_inv, self.position), q_inv)

    def transform_point(self, p) -> np.ndarray:
        return self.position + quat_rotate(self.orientation, vec3(p))

    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    def approx_equal(self, other: "Pose", tol: float = 1e-9) -> bool:
        if np.linalg.norm(self.position - other.position) > tol:
            return False
        # q and -q are the same rotation
        d = quat_multiply(quat_conjugate(self.orientation), other.orientation)
        return quat_angle(d) <= tol


@dataclass(frozen=True, eq=False)
class Twist:
    """Base-frame spatial velocity: linear in m/s, angular in rad/s."""

    linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "linear", vec3(self.linear))
        object.__setattr__(self, "angular", vec3(self.angular))

    @classmethod
    def zero(cls) -> "Twist":
        return cls()

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])

    def is_zero(self) -> bool:
        return not (np.any(self.linear) or np.any(self.angular))

    def scaled(self, s: float) -> "Twist":
        return Twist(s * self.linear, s * self.angular)
