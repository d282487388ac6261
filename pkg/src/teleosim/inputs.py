"""Operator input adapters.

Three front ends feed the controller: world-frame control-sphere poses
(drag-style interfaces), normalized 6-axis device twists with the classic
mixed reference frame (translation in the robot base frame, rotation in the
end-effector frame), and scripted trajectory files for headless runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import alignment
from .control import SpeedLimits, SpeedMode
from .errors import TrajectoryFormatError
from .geometry import Pose, Twist, quat_rotate, vec3
from .protocol import SequenceGate, WireMessage, parse_message

DEFAULT_DEADBAND = 0.02  # axes below this are treated as released


@dataclass(frozen=True, eq=False)
class SphereInput:
    """Control-sphere sample in the operator's world frame."""

    pose: Pose
    engaged: bool
    timestamp: float


@dataclass(frozen=True, eq=False)
class DeviceTwist:
    """Normalized 6-axis device sample; components in [-1, 1]."""

    translation: np.ndarray
    rotation: np.ndarray
    button: bool = False

    def __post_init__(self):
        t = vec3(self.translation)
        r = vec3(self.rotation)
        if np.any(np.abs(t) > 1.0) or np.any(np.abs(r) > 1.0):
            raise ValueError("device axes must be normalized to [-1, 1]")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "rotation", r)


def sphere_to_target(inp: SphereInput, anchor: alignment.AnchorTransform) -> tuple[Pose, bool]:
    """Map an operator-frame sphere pose through the anchor into the base
    frame; engagement passes through unchanged."""
    return alignment.apply(anchor, inp.pose), inp.engaged


def spacemouse_to_twist(inp: DeviceTwist, ee_orientation, limits: SpeedLimits,
                        mode: SpeedMode = SpeedMode.NORMAL,
                        deadband: float = DEFAULT_DEADBAND) -> Twist:
    """Device axes to a base-frame twist with the mixed-frame convention.

    Translation axes scale directly to base-frame linear velocity; rotation
    axes are interpreted in the end-effector frame and re-expressed in the
    base frame through `ee_orientation`. Both share the speed caps and
    slow-mode scaling of the pose controller.
    """
    s = limits.scale(mode)
    t = _deadbanded(inp.translation, deadband)
    r = _deadbanded(inp.rotation, deadband)
    return Twist(
        s * limits.v_max * t,
        s * limits.w_max * quat_rotate(np.asarray(ee_orientation, dtype=float), r),
    )


def _deadbanded(axes: np.ndarray, deadband: float) -> np.ndarray:
    out = axes.copy()
    out[np.abs(out) < deadband] = 0.0
    return out


# ---------------------------------------------------------------------------
# Scripted trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScriptedTrajectory:
    """Timestamp-ordered wire messages, replayable against a live loop."""

    events: tuple[WireMessage, ...]

    def __post_init__(self):
        last = None
        for ev in self.events:
            if last is not None and ev.timestamp <= last:
                raise TrajectoryFormatError(
                    f"timestamps must be strictly increasing "
                    f"({ev.timestamp} after {last})"
                )
            last = ev.timestamp

    @property
    def duration(self) -> float:
        return self.events[-1].timestamp if self.events else 0.0


@dataclass(frozen=True)
class ReplayReport:
    events_delivered: int
    ticks: int
    duration: float


def load_trajectory(path) -> ScriptedTrajectory:
    """Parse a line-delimited trajectory file (wire-message schema)."""
    events = []
    gate = SequenceGate()
    with open(Path(path)) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                msg = parse_message(line)
                gate.admit(msg.seq)
            except ValueError as e:
                raise TrajectoryFormatError(str(e), line=lineno) from e
            events.append(msg)
    return ScriptedTrajectory(tuple(events))


def save_trajectory(traj: ScriptedTrajectory, path) -> None:
    with open(Path(path), "w") as f:
        for ev in traj.events:
            f.write(ev.to_json() + "\n")


def replay(traj: ScriptedTrajectory, sink, rate: float = 50.0,
           duration: float | None = None) -> ReplayReport:
    """Drive a command consumer through a trajectory in simulated time.

    The sink must provide deliver(message) and tick(); ticks advance at
    1/rate seconds each. Events are delivered, in order, before the first
    tick at or after their timestamp, so a run is deterministic for a fixed
    rate. Runs floor(duration * rate) ticks; duration defaults to the last
    event's timestamp.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    if duration is None:
        duration = traj.duration
    total_ticks = int(np.floor(duration * rate + 1e-9))
    delivered = 0
    dt = 1.0 / rate
    for k in range(total_ticks):
        t_k = k * dt
        while delivered < len(traj.events) and traj.events[delivered].timestamp <= t_k + 1e-12:
            sink.deliver(traj.events[delivered])
            delivered += 1
        sink.tick()
    # events timed at/after the final tick boundary still get delivered
    while delivered < len(traj.events) and traj.events[delivered].timestamp <= duration:
        sink.deliver(traj.events[delivered])
        delivered += 1
    return ReplayReport(events_delivered=delivered, ticks=total_ticks, duration=duration)
