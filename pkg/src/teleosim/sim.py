"""Headless kinematic world: joint-velocity integration with limit clamping,
grasp attachment, and the four benchmark task scenes with their scoring.

Tasks are encoded as ordered tool-pose checkpoints with gripper and
held-object conditions; physical effects (pouring, insertion) are abstracted
into pose regions plus, where the skill is rate-sensitive, a cap on the
tool's angular speed at the checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .control import GripperState
from .geometry import Pose, Twist, quat_angle, quat_conjugate, quat_multiply
from .kinematics import JointState, KinematicChain, forward_kinematics, jacobian

DEFAULT_TIME_LIMIT = 180.0
SCENE_IDS = ("POUR", "PEG_IN_HOLE", "RING_ON_PEG", "BOOKSHELF")


@dataclass(frozen=True, eq=False)
class SceneObject:
    object_id: str
    pose: Pose


@dataclass(frozen=True, eq=False)
class GraspZone:
    """Sphere around an object's current position; closing inside attaches."""

    object_id: str
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("grasp zone radius must be positive")


@dataclass(frozen=True, eq=False)
class Checkpoint:
    name: str
    pose: Pose
    pos_tol: float
    ori_tol: float
    gripper: GripperState
    held: str | None
    max_angular_speed: float | None = None

    def __post_init__(self):
        if self.pos_tol <= 0 or self.ori_tol <= 0:
            raise ValueError(f"checkpoint '{self.name}': tolerances must be strictly positive")
        if self.max_angular_speed is not None and self.max_angular_speed <= 0:
            raise ValueError(f"checkpoint '{self.name}': max_angular_speed must be positive")

    def satisfied_by(self, state: "RobotState") -> bool:
        if np.linalg.norm(state.tool_pose.position - self.pose.position) > self.pos_tol:
            return False
        dq = quat_multiply(self.pose.orientation, quat_conjugate(state.tool_pose.orientation))
        if quat_angle(dq) > self.ori_tol:
            return False
        if state.gripper is not self.gripper:
            return False
        if state.held_object != self.held:
            return False
        if self.max_angular_speed is not None:
            if float(np.linalg.norm(state.tool_twist.angular)) > self.max_angular_speed:
                return False
        return True


@dataclass(frozen=True, eq=False)
class TaskScene:
    task: str
    checkpoints: tuple[Checkpoint, ...]
    grasp_zones: tuple[GraspZone, ...]
    objects: tuple[SceneObject, ...]
    start_joints: np.ndarray
    time_limit: float = DEFAULT_TIME_LIMIT
    partial_threshold: int = 1

    def __post_init__(self):
        if not self.checkpoints:
            raise ValueError("scene must define at least one checkpoint")
        if not 1 <= self.partial_threshold <= len(self.checkpoints):
            raise ValueError("partial_threshold must be within 1..len(checkpoints)")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        object.__setattr__(
            self, "start_joints", np.asarray(self.start_joints, dtype=float)
        )
        ids = [o.object_id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        known = set(ids)
        for z in self.grasp_zones:
            if z.object_id not in known:
                raise ValueError(f"grasp zone references unknown object '{z.object_id}'")


@dataclass(frozen=True, eq=False)
class RobotState:
    """Snapshot of the simulated arm and the objects it can interact with."""

    joints: JointState
    tool_pose: Pose
    gripper: GripperState = GripperState.OPEN
    held_object: str | None = None
    held_offset: Pose | None = None           # object pose in the tool frame
    object_poses: dict = field(default_factory=dict)
    sim_time: float = 0.0
    tool_twist: Twist = field(default_factory=Twist.zero)
    clamp_events: int = 0


def initial_state(chain: KinematicChain, scene: TaskScene) -> RobotState:
    q = scene.start_joints
    return RobotState(
        joints=JointState(q),
        tool_pose=forward_kinematics(chain, q),
        object_poses={o.object_id: o.pose for o in scene.objects},
    )


def step(chain: KinematicChain, state: RobotState, qdot, dt: float) -> RobotState:
    """Integrate joint velocities for dt seconds with limit clamping.

    Velocities are clamped per joint to the chain's limits, positions to the
    joint range; each clamped component counts one clamp event. A held
    object follows the tool rigidly.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    qdot = np.asarray(qdot, dtype=float).reshape(-1)
    if qdot.shape != (chain.n,):
        raise ValueError(f"expected {chain.n} joint velocities, got {qdot.shape[0]}")
    if not np.all(np.isfinite(qdot)):
        raise ValueError("joint velocities must be finite")

    q = state.joints.positions
    vlim = chain.velocity_limits
    qdot_c = np.clip(qdot, -vlim, vlim)
    clamps = int(np.count_nonzero(qdot_c != qdot))

    lo, hi = chain.position_limits
    q_new = np.clip(q + qdot_c * dt, lo, hi)
    clamps += int(np.count_nonzero(q_new != q + qdot_c * dt))

    qdot_eff = (q_new - q) / dt
    tool = forward_kinematics(chain, q_new)
    jac = jacobian(chain, q)
    realized = jac @ qdot_eff

    objects = state.object_poses
    if state.held_object is not None:
        objects = dict(objects)
        objects[state.held_object] = tool.compose(state.held_offset)

    return replace(
        state,
        joints=JointState(q_new, qdot_eff),
        tool_pose=tool,
        object_poses=objects,
        sim_time=state.sim_time + dt,
        tool_twist=Twist(realized[:3], realized[3:]),
        clamp_events=state.clamp_events + clamps,
    )


def grasp_check(state: RobotState, scene: TaskScene) -> RobotState:
    """Resolve grasping after a gripper transition.

    A closed gripper with the tool inside some object's grasp zone attaches
    that object (nearest wins); an open gripper drops whatever is held at
    its current pose.
    """
    if state.gripper is GripperState.OPEN:
        if state.held_object is None:
            return state
        return replace(state, held_object=None, held_offset=None)

    if state.held_object is not None:
        return state
    tool_p = state.tool_pose.position
    best = None
    best_d = np.inf
    for zone in scene.grasp_zones:
        d = float(np.linalg.norm(tool_p - state.object_poses[zone.object_id].position))
        if d <= zone.radius and d < best_d:
            best, best_d = zone.object_id, d
    if best is None:
        return state
    offset = state.tool_pose.inverse().compose(state.object_poses[best])
    return replace(state, held_object=best, held_offset=offset)


# ---------------------------------------------------------------------------
# Task progress and scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaskProgress:
    cleared: int = 0
    clear_times: tuple[float, ...] = ()


def advance_task(scene: TaskScene, state: RobotState, progress: TaskProgress) -> TaskProgress:
    """Clear the next checkpoint(s) whose conditions the state satisfies.

    Progress is monotone: cleared checkpoints never revert. Consecutive
    checkpoints satisfied by the same state (e.g. a release that also meets
    the following region) cascade in one call.
    """
    cleared = progress.cleared
    times = list(progress.clear_times)
    while cleared < len(scene.checkpoints) and scene.checkpoints[cleared].satisfied_by(state):
        cleared += 1
        times.append(state.sim_time)
    if cleared == progress.cleared:
        return progress
    return TaskProgress(cleared, tuple(times))


@dataclass(frozen=True)
class TrialResult:
    task: str
    score: int
    elapsed: float
    attempts: int = 1
    log_ref: str | None = None


def score_trial(progress: TaskProgress, elapsed: float, scene: TaskScene,
                attempts: int = 1, log_ref: str | None = None) -> TrialResult:
    """Score one trial: 100 for all checkpoints, 50 past the partial
    threshold, 0 otherwise; unsuccessful trials report the full time limit."""
    if elapsed < 0:
        raise ValueError("elapsed must be non-negative")
    total = len(scene.checkpoints)
    if progress.cleared >= total:
        score = 100
    elif progress.cleared >= scene.partial_threshold:
        score = 50
    else:
        score = 0
    reported = min(elapsed, scene.time_limit) if score > 0 else scene.time_limit
    return TrialResult(scene.task, score, reported, attempts=attempts, log_ref=log_ref)


def best_trial(trials) -> TrialResult:
    """Most successful trial: highest score, ties broken by lower elapsed."""
    trials = list(trials)
    if not trials:
        raise ValueError("best_trial needs at least one trial")
    return max(trials, key=lambda t: (t.score, -t.elapsed))


# ---------------------------------------------------------------------------
# Scene configuration files
# ---------------------------------------------------------------------------

_CHECKPOINT_FIELDS = ("name", "position", "orientation", "pos_tol", "ori_tol", "gripper", "held")


def scene_from_dict(doc: dict) -> TaskScene:
    for key in ("id", "start_joints", "checkpoints", "objects", "grasp_zones"):
        if key not in doc:
            raise ValueError(f"scene config: missing field '{key}'")
    checkpoints = []
    for i, node in enumerate(doc["checkpoints"]):
        for f in _CHECKPOINT_FIELDS:
            if f not in node:
                raise ValueError(f"scene config: checkpoint {i}: missing field '{f}'")
        held = node["held"]
        checkpoints.append(Checkpoint(
            name=str(node["name"]),
            pose=Pose(node["position"], node["orientation"]),
            pos_tol=float(node["pos_tol"]),
            ori_tol=float(node["ori_tol"]),
            gripper=GripperState(node["gripper"]),
            held=None if held in (None, "none") else str(held),
            max_angular_speed=(
                float(node["max_angular_speed"]) if node.get("max_angular_speed") else None
            ),
        ))
    objects = tuple(
        SceneObject(str(o["id"]), Pose(o["position"], o["orientation"]))
        for o in doc["objects"]
    )
    zones = tuple(
        GraspZone(str(z["object"]), float(z["radius"])) for z in doc["grasp_zones"]
    )
    return TaskScene(
        task=str(doc["id"]),
        checkpoints=tuple(checkpoints),
        grasp_zones=zones,
        objects=objects,
        start_joints=doc["start_joints"],
        time_limit=float(doc.get("time_limit", DEFAULT_TIME_LIMIT)),
        partial_threshold=int(doc.get("partial_threshold", 1)),
    )


def load_scene(path) -> TaskScene:
    with open(Path(path)) as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict):
        raise ValueError(f"scene config {path}: expected a mapping at top level")
    return scene_from_dict(doc)


def builtin_scene(scene_id: str) -> TaskScene:
    """Load one of the packaged benchmark scenes by id."""
    from importlib.resources import files

    sid = scene_id.upper()
    if sid not in SCENE_IDS:
        raise ValueError(f"unknown scene '{scene_id}', expected one of {SCENE_IDS}")
    path = files("teleosim").joinpath(f"data/scenes/{sid.lower()}.yaml")
    return scene_from_dict(yaml.safe_load(path.read_text()))


def scene_to_dict(scene: TaskScene) -> dict:
    return {
        "id": scene.task,
        "time_limit": scene.time_limit,
        "partial_threshold": scene.partial_threshold,
        "start_joints": scene.start_joints.tolist(),
        "objects": [
            {
                "id": o.object_id,
                "position": o.pose.position.tolist(),
                "orientation": o.pose.orientation.tolist(),
            }
            for o in scene.objects
        ],
        "grasp_zones": [
            {"object": z.object_id, "radius": z.radius} for z in scene.grasp_zones
        ],
        "checkpoints": [
            {
                "name": c.name,
                "position": c.pose.position.tolist(),
                "orientation": c.pose.orientation.tolist(),
                "pos_tol": c.pos_tol,
                "ori_tol": c.ori_tol,
                "gripper": c.gripper.value,
                "held": c.held if c.held is not None else "none",
                **(
                    {"max_angular_speed": c.max_angular_speed}
                    if c.max_angular_speed is not None
                    else {}
                ),
            }
            for c in scene.checkpoints
        ],
    }
