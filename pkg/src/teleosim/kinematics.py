"""Serial-chain kinematics: forward kinematics, geometric Jacobian, and
damped-least-squares velocity IK.

Chain convention: joint j contributes ``offset_j * Rot(axis_j, q_j)`` where
``offset_j`` is the fixed transform from the previous joint frame and the
rotation is about ``axis_j`` expressed in the joint's own frame. The tool
transform is appended after the last joint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import SingularityError
from .geometry import (
    Pose,
    Twist,
    quat_conjugate,
    quat_from_axis_angle,
    quat_multiply,
    quat_rotate,
    quat_to_rotvec,
    vec3,
)

# Keeps joint rates bounded near singularities while attenuating realized
# tool speed by under 2% at well-conditioned postures.
DEFAULT_DAMPING = 0.02


@dataclass(frozen=True, eq=False)
class Joint:
    axis: np.ndarray          # unit vector in the joint's local frame
    offset: Pose              # fixed transform from parent frame
    lo: float                 # position limits, radians
    hi: float
    velocity_limit: float     # rad/s

    def __post_init__(self):
        a = vec3(self.axis)
        n = float(np.linalg.norm(a))
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"joint axis must be unit norm, got |axis| = {n}")
        object.__setattr__(self, "axis", a)
        if not self.lo < self.hi:
            raise ValueError(f"joint limits must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.velocity_limit <= 0:
            raise ValueError("velocity limit must be positive")


@dataclass(frozen=True, eq=False)
class KinematicChain:
    name: str
    joints: tuple[Joint, ...]
    tool: Pose = field(default_factory=Pose.identity)

    @property
    def n(self) -> int:
        return len(self.joints)

    @property
    def position_limits(self) -> np.ndarray:
        """(2, N) array of lower/upper joint limits."""
        return np.array([[j.lo for j in self.joints], [j.hi for j in self.joints]])

    @property
    def velocity_limits(self) -> np.ndarray:
        return np.array([j.velocity_limit for j in self.joints])


@dataclass(frozen=True, eq=False)
class JointState:
    """Joint-space state of the arm: positions (rad) and velocities (rad/s)."""

    positions: np.ndarray
    velocities: np.ndarray = None

    def __post_init__(self):
        q = np.asarray(self.positions, dtype=float).reshape(-1)
        object.__setattr__(self, "positions", q)
        v = self.velocities
        v = np.zeros_like(q) if v is None else np.asarray(v, dtype=float).reshape(-1)
        if v.shape != q.shape:
            raise ValueError("positions and velocities must have the same length")
        object.__setattr__(self, "velocities", v)


def _joint_positions(chain: KinematicChain, q) -> np.ndarray:
    q = np.asarray(getattr(q, "positions", q), dtype=float).reshape(-1)
    if q.shape != (chain.n,):
        raise ValueError(f"chain '{chain.name}' has {chain.n} joints, got {q.shape[0]} values")
    if not np.all(np.isfinite(q)):
        raise ValueError("joint positions must be finite")
    return q


def joint_frames(chain: KinematicChain, q) -> list[Pose]:
    """Base-frame pose of each joint frame (after its fixed offset, before
    its own rotation is meaningful for the origin), plus the tool frame last.

    Returns N + 1 poses; element j carries the origin and axis frame of
    joint j, element N is the tool pose.
    """
    q = _joint_positions(chain, q)
    frames = []
    t = Pose.identity()
    for joint, qj in zip(chain.joints, q):
        t = t.compose(joint.offset)
        frames.append(t)
        t = t.compose(Pose(np.zeros(3), quat_from_axis_angle(joint.axis, qj)))
    frames.append(t.compose(chain.tool))
    return frames


def forward_kinematics(chain: KinematicChain, q) -> Pose:
    """Base-frame tool pose for joint positions q."""
    return joint_frames(chain, q)[-1]


def jacobian(chain: KinematicChain, q) -> np.ndarray:
    """Geometric Jacobian (6 x N) at the tool origin, base-frame coordinates.

    Rows 0-2 map joint rates to linear velocity, rows 3-5 to angular.
    """
    frames = joint_frames(chain, q)
    tool_p = frames[-1].position
    jac = np.zeros((6, chain.n))
    for j, joint in enumerate(chain.joints):
        axis_world = quat_rotate(frames[j].orientation, joint.axis)
        jac[:3, j] = np.cross(axis_world, tool_p - frames[j].position)
        jac[3:, j] = axis_world
    return jac


def dls_velocity_ik(jac: np.ndarray, twist, damping: float = DEFAULT_DAMPING) -> np.ndarray:
    """Joint velocities realizing a commanded twist via damped least squares.

    Solves (J^T J + damping^2 I) qdot = J^T v, which minimizes
    ||J qdot - v||^2 + damping^2 ||qdot||^2 and stays bounded near
    singularities whenever damping > 0.
    """
    jac = np.asarray(jac, dtype=float)
    v = twist.as_vector() if isinstance(twist, Twist) else np.asarray(twist, dtype=float)
    if jac.ndim != 2 or jac.shape[0] != v.shape[0]:
        raise ValueError(f"jacobian {jac.shape} incompatible with twist of length {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("twist must be finite")
    if not (np.isfinite(damping) and damping >= 0.0):
        raise ValueError("damping must be finite and non-negative")

    n = jac.shape[1]
    jtj = jac.T @ jac
    if damping == 0.0:
        if np.linalg.matrix_rank(jtj) < n:
            raise SingularityError(
                "J^T J is singular with zero damping; supply damping > 0"
            )
        return np.linalg.solve(jtj, jac.T @ v)
    return np.linalg.solve(jtj + damping * damping * np.eye(n), jac.T @ v)


def pose_error(current: Pose, target: Pose) -> tuple[np.ndarray, np.ndarray]:
    """Base-frame error from current to target.

    Returns (dp, dtheta): dp is the translation target - current in meters,
    dtheta the rotation vector of target * current^-1 in radians.
    """
    dp = target.position - current.position
    dq = quat_multiply(target.orientation, quat_conjugate(current.orientation))
    return dp, quat_to_rotvec(dq)


# ---------------------------------------------------------------------------
# Chain configuration files
# ---------------------------------------------------------------------------

_JOINT_FIELDS = ("axis", "offset", "limits", "velocity_limit")


def _pose_from_config(node, where: str) -> Pose:
    if not isinstance(node, dict):
        raise ValueError(f"{where}: expected a mapping with position/orientation")
    for key in ("position", "orientation"):
        if key not in node:
            raise ValueError(f"{where}: missing field '{key}'")
    return Pose(node["position"], node["orientation"])


def chain_from_dict(doc: dict) -> KinematicChain:
    """Build a chain from a parsed config document; rejects missing fields."""
    for key in ("name", "joints", "tool"):
        if key not in doc:
            raise ValueError(f"chain config: missing field '{key}'")
    joints = []
    for i, jnode in enumerate(doc["joints"]):
        for f in _JOINT_FIELDS:
            if f not in jnode:
                raise ValueError(f"chain config: joint {i}: missing field '{f}'")
        lo, hi = jnode["limits"]
        joints.append(Joint(
            axis=jnode["axis"],
            offset=_pose_from_config(jnode["offset"], f"joint {i} offset"),
            lo=float(lo),
            hi=float(hi),
            velocity_limit=float(jnode["velocity_limit"]),
        ))
    return KinematicChain(
        name=str(doc["name"]),
        joints=tuple(joints),
        tool=_pose_from_config(doc["tool"], "tool"),
    )


def chain_to_dict(chain: KinematicChain) -> dict:
    return {
        "name": chain.name,
        "joints": [
            {
                "axis": j.axis.tolist(),
                "offset": {
                    "position": j.offset.position.tolist(),
                    "orientation": j.offset.orientation.tolist(),
                },
                "limits": [j.lo, j.hi],
                "velocity_limit": j.velocity_limit,
            }
            for j in chain.joints
        ],
        "tool": {
            "position": chain.tool.position.tolist(),
            "orientation": chain.tool.orientation.tolist(),
        },
    }


def load_chain(path) -> KinematicChain:
    with open(Path(path)) as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict):
        raise ValueError(f"chain config {path}: expected a mapping at top level")
    return chain_from_dict(doc)


def default_chain() -> KinematicChain:
    """The packaged 7-DOF chain (datasheet-derived offsets, config not truth)."""
    from importlib.resources import files

    path = files("teleosim").joinpath("data/chains/gen3_7dof.yaml")
    return chain_from_dict(yaml.safe_load(path.read_text()))
