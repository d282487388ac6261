"""Pose-target teleoperation control law.

Turns the operator's engagement state and commanded target pose into capped
twist commands: error-proportional inside a ramp region, saturated at the
speed caps outside it, exactly zero whenever the operator is disengaged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import Pose, Twist
from .kinematics import pose_error

DEFAULT_LINEAR_SPEED_CAP = 0.0625   # m/s
DEFAULT_ANGULAR_SPEED_CAP = 0.25    # rad/s
DEFAULT_SLOW_FACTOR = 1.0 / 3.0
DEFAULT_RAMP_RADIUS = 0.05          # m: error below this scales speed linearly
DEFAULT_RAMP_ANGLE = 0.2            # rad


class SpeedMode(enum.Enum):
    NORMAL = "normal"
    SLOW = "slow"


class GripperState(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


class GripperSource(enum.Enum):
    VOICE = "voice"
    BUTTON = "button"
    DOUBLE_TAP = "double_tap"


class GripperAction(enum.Enum):
    OPEN = "open"
    CLOSE = "close"
    TOGGLE = "toggle"


@dataclass(frozen=True)
class SpeedLimits:
    v_max: float = DEFAULT_LINEAR_SPEED_CAP
    w_max: float = DEFAULT_ANGULAR_SPEED_CAP
    slow_factor: float = DEFAULT_SLOW_FACTOR
    ramp_radius: float = DEFAULT_RAMP_RADIUS
    ramp_angle: float = DEFAULT_RAMP_ANGLE

    def __post_init__(self):
        for name in ("v_max", "w_max", "ramp_radius", "ramp_angle"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.slow_factor <= 1.0:
            raise ValueError("slow_factor must be in (0, 1]")

    def scale(self, mode: SpeedMode) -> float:
        return 1.0 if mode is SpeedMode.NORMAL else self.slow_factor


@dataclass(frozen=True)
class GripperEvent:
    source: GripperSource
    action: GripperAction

    def __post_init__(self):
        if self.source is GripperSource.DOUBLE_TAP:
            if self.action is not GripperAction.TOGGLE:
                raise ValueError("double-tap gestures carry only the toggle action")
        elif self.action is GripperAction.TOGGLE:
            raise ValueError(f"{self.source.value} events carry open or close, not toggle")


@dataclass(frozen=True)
class ControlSession:
    """The operator's live intent, updated only through the functions below."""

    engaged: bool = False
    target: Pose = field(default_factory=Pose.identity)
    speed_mode: SpeedMode = SpeedMode.NORMAL
    gripper: GripperState = GripperState.OPEN
    last_update: float = -math.inf
    stale_drops: int = 0


def _ramped(err: np.ndarray, cap: float, ramp: float) -> np.ndarray:
    n = float(np.linalg.norm(err))
    if n == 0.0:
        return np.zeros(3)
    return cap * min(1.0, n / ramp) * (err / n)


def compute_twist(current: Pose, target: Pose, limits: SpeedLimits,
                  mode: SpeedMode = SpeedMode.NORMAL) -> Twist:
    """Capped twist driving `current` toward `target`.

    Speed is proportional to the pose error inside the ramp region and
    saturates at the (mode-scaled) caps outside it, so the output norm never
    exceeds s*v_max linear / s*w_max angular.
    """
    dp, dtheta = pose_error(current, target)
    s = limits.scale(mode)
    return Twist(
        _ramped(dp, s * limits.v_max, limits.ramp_radius),
        _ramped(dtheta, s * limits.w_max, limits.ramp_angle),
    )


def control_tick(session: ControlSession, robot_pose: Pose, limits: SpeedLimits) -> Twist:
    """One controller evaluation. Disengaged sessions produce an exactly-zero
    twist; engaged ones chase the stored target."""
    if not session.engaged:
        return Twist.zero()
    return compute_twist(robot_pose, session.target, limits, session.speed_mode)


def apply_gripper_event(session: ControlSession, ev: GripperEvent) -> ControlSession:
    if ev.action is GripperAction.OPEN:
        g = GripperState.OPEN
    elif ev.action is GripperAction.CLOSE:
        g = GripperState.CLOSED
    else:
        g = GripperState.OPEN if session.gripper is GripperState.CLOSED else GripperState.CLOSED
    return replace(session, gripper=g)


def set_speed_mode(session: ControlSession, mode: SpeedMode) -> ControlSession:
    return replace(session, speed_mode=mode)


def update_target(session: ControlSession, pose: Pose, engaged: bool,
                  t: float) -> ControlSession:
    """Store the latest commanded pose/engagement, latest-wins by timestamp.

    Messages older than the last accepted one (out-of-order delivery) are
    dropped and counted in `stale_drops`.
    """
    if t < session.last_update:
        return replace(session, stale_drops=session.stale_drops + 1)
    return replace(session, target=pose, engaged=engaged, last_update=t)
