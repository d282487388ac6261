"""Message-driven control runtime: route operator messages, run the
fixed-timestep loop (input, control law, IK, sim step, task progress,
broadcast), record demonstrations, and replay them deterministically.

Time here is simulated: every tick advances exactly 1/control_rate seconds
regardless of wall clock, so N seconds always yields floor(N * rate) ticks
and a recorded run can be reproduced bit for bit. The network front end
(see `server`) paces the same runtime against the wall clock when asked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .alignment import AnchorTransform, apply as anchor_apply, register
from .control import (
    ControlSession,
    GripperAction,
    GripperEvent,
    GripperSource,
    SpeedLimits,
    SpeedMode,
    apply_gripper_event,
    control_tick,
    set_speed_mode,
    update_target,
)
from .errors import (
    DegenerateConfigurationError,
    ProtocolError,
    RegistrationError,
    SingularityError,
    TrajectoryFormatError,
)
from .geometry import Pose, Twist
from .inputs import DeviceTwist, ScriptedTrajectory, spacemouse_to_twist
from .kinematics import (
    DEFAULT_DAMPING,
    JointState,
    KinematicChain,
    chain_from_dict,
    chain_to_dict,
    dls_velocity_ik,
    forward_kinematics,
    jacobian,
)
from .protocol import (
    CLIENT_TYPES,
    WireMessage,
    ack_message,
    error_message,
    parse_message,
    validate_payload,
    SequenceGate,
)
from .sim import (
    RobotState,
    TaskScene,
    TrialResult,
    TaskProgress,
    advance_task,
    best_trial,
    grasp_check,
    initial_state,
    scene_to_dict,
    score_trial,
    step,
)

DEMO_FORMAT_VERSION = 1

# Continuous input types coalesce per tick; newest message per type wins.
# Mode changes apply before the gripper so a grasp happens under the mode
# that accompanied it, and both precede motion inputs.
DRAIN_ORDER = ("speed_mode", "gripper", "pose_target", "device_twist")


@dataclass(frozen=True)
class LoopConfig:
    control_rate: float = 50.0
    broadcast_rate: float = 20.0
    damping: float = DEFAULT_DAMPING
    watchdog: float | None = 0.5          # None disables the stale-input halt
    limits: SpeedLimits = field(default_factory=SpeedLimits)

    def __post_init__(self):
        if self.control_rate <= 0 or self.broadcast_rate <= 0:
            raise ValueError("rates must be positive")
        if self.broadcast_rate > self.control_rate:
            raise ValueError("broadcast rate cannot exceed the control rate")
        if self.watchdog is not None and self.watchdog <= 0:
            raise ValueError("watchdog window must be positive (or None)")

    @property
    def dt(self) -> float:
        return 1.0 / self.control_rate


class Mailbox:
    """Latest-wins slot per message type, drained once per control tick."""

    def __init__(self):
        self._slots: dict[str, WireMessage] = {}

    def put(self, msg: WireMessage) -> None:
        self._slots[msg.type] = msg

    def drain(self) -> list[WireMessage]:
        out = [self._slots[t] for t in DRAIN_ORDER if t in self._slots]
        self._slots.clear()
        return out

    def __len__(self) -> int:
        return len(self._slots)


def _twist_to_qdot(chain: KinematicChain, q: np.ndarray, twist: Twist,
                   damping: float) -> np.ndarray:
    """Shared IK path for live ticks and demo replay; both must match
    operation for operation or recorded runs stop being reproducible."""
    if twist.is_zero():
        return np.zeros(chain.n)
    return dls_velocity_ik(jacobian(chain, q), twist, damping=damping)


# ---------------------------------------------------------------------------
# Demonstration records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DemoHeader:
    version: int
    control_rate: float
    damping: float
    task: str
    chain: dict
    initial_joints: list


@dataclass(frozen=True, eq=False)
class DemoTick:
    tick: int
    sim_time: float
    joints: np.ndarray
    tool: Pose
    twist: Twist
    engaged: bool
    gripper: str
    speed_mode: str
    task: str


@dataclass(frozen=True)
class DemoLog:
    header: DemoHeader | None
    ticks: tuple[DemoTick, ...]


class DemoWriter:
    """Streams one demonstration to a line-delimited file, header first."""

    def __init__(self, path, chain: KinematicChain, scene: TaskScene,
                 initial_joints, config: LoopConfig):
        self._f = open(Path(path), "w")
        self._write({
            "record": "header",
            "version": DEMO_FORMAT_VERSION,
            "control_rate": config.control_rate,
            "damping": config.damping,
            "task": scene.task,
            "chain": chain_to_dict(chain),
            "initial_joints": np.asarray(initial_joints, dtype=float).tolist(),
        })

    def _write(self, doc: dict) -> None:
        self._f.write(json.dumps(doc) + "\n")

    def record_tick(self, tick: int, state: RobotState, twist: Twist,
                    session: ControlSession, task: str) -> None:
        self._write({
            "record": "tick",
            "tick": tick,
            "sim_time": state.sim_time,
            "joints": state.joints.positions.tolist(),
            "tool": {
                "position": state.tool_pose.position.tolist(),
                "orientation": state.tool_pose.orientation.tolist(),
            },
            "twist": {
                "linear": twist.linear.tolist(),
                "angular": twist.angular.tolist(),
            },
            "engaged": session.engaged,
            "gripper": state.gripper.value,
            "speed_mode": session.speed_mode.value,
            "task": task,
        })

    def close(self) -> None:
        if not self._f.closed:
            self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _demo_field(doc: dict, name: str, lineno: int):
    if name not in doc:
        raise TrajectoryFormatError(f"demo record missing field '{name}'", line=lineno)
    return doc[name]


def load_demo(path) -> DemoLog:
    """Read a demonstration file; raises TrajectoryFormatError with the
    offending line number on corrupt or truncated input. An empty file is a
    valid empty demonstration."""
    header = None
    ticks = []
    last_tick = None
    with open(Path(path)) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise TrajectoryFormatError(f"invalid JSON: {e}", line=lineno) from e
            if not isinstance(doc, dict):
                raise TrajectoryFormatError("demo record must be an object", line=lineno)
            kind = doc.get("record")
            if header is None:
                if kind != "header":
                    raise TrajectoryFormatError(
                        "first demo record must be the header", line=lineno
                    )
                header = DemoHeader(
                    version=int(_demo_field(doc, "version", lineno)),
                    control_rate=float(_demo_field(doc, "control_rate", lineno)),
                    damping=float(_demo_field(doc, "damping", lineno)),
                    task=str(_demo_field(doc, "task", lineno)),
                    chain=_demo_field(doc, "chain", lineno),
                    initial_joints=list(_demo_field(doc, "initial_joints", lineno)),
                )
                continue
            if kind != "tick":
                raise TrajectoryFormatError(f"unknown demo record '{kind}'", line=lineno)
            tick = int(_demo_field(doc, "tick", lineno))
            if last_tick is not None and tick <= last_tick:
                raise TrajectoryFormatError(
                    f"tick numbers must be strictly increasing ({tick} after {last_tick})",
                    line=lineno,
                )
            last_tick = tick
            tool = _demo_field(doc, "tool", lineno)
            twist = _demo_field(doc, "twist", lineno)
            try:
                ticks.append(DemoTick(
                    tick=tick,
                    sim_time=float(_demo_field(doc, "sim_time", lineno)),
                    joints=np.asarray(_demo_field(doc, "joints", lineno), dtype=float),
                    tool=Pose(tool["position"], tool["orientation"]),
                    twist=Twist(twist["linear"], twist["angular"]),
                    engaged=bool(_demo_field(doc, "engaged", lineno)),
                    gripper=str(_demo_field(doc, "gripper", lineno)),
                    speed_mode=str(_demo_field(doc, "speed_mode", lineno)),
                    task=str(_demo_field(doc, "task", lineno)),
                ))
            except (KeyError, TypeError, ValueError) as e:
                raise TrajectoryFormatError(f"malformed tick record: {e}", line=lineno) from e
    return DemoLog(header=header, ticks=tuple(ticks))


def replay_demo(log: DemoLog) -> list[np.ndarray]:
    """Re-simulate a demonstration from its header state, driving the
    recorded commanded twists through the same IK/clamp/step path the live
    loop uses. Returns the recomputed joint trajectory."""
    if log.header is None:
        return []
    chain = chain_from_dict(log.header.chain)
    q = np.asarray(log.header.initial_joints, dtype=float)
    state = RobotState(joints=JointState(q), tool_pose=forward_kinematics(chain, q))
    dt = 1.0 / log.header.control_rate
    out = []
    for rec in log.ticks:
        qdot = _twist_to_qdot(chain, state.joints.positions, rec.twist, log.header.damping)
        state = step(chain, state, qdot, dt)
        out.append(state.joints.positions.copy())
    return out


@dataclass(frozen=True)
class DemoVerification:
    ticks: int
    max_joint_error: float
    bitwise_equal: bool


def verify_demo(log: DemoLog) -> DemoVerification:
    """Replay and compare against the logged joint trajectory."""
    replayed = replay_demo(log)
    max_err = 0.0
    bitwise = True
    for rec, q in zip(log.ticks, replayed):
        max_err = max(max_err, float(np.max(np.abs(rec.joints - q))) if q.size else 0.0)
        bitwise = bitwise and np.array_equal(rec.joints, q)
    return DemoVerification(len(replayed), max_err, bitwise)


# ---------------------------------------------------------------------------
# The runtime
# ---------------------------------------------------------------------------


class _TrialBook:
    """Start/finish bookkeeping for scored attempts on the active scene."""

    def __init__(self):
        self.active = False
        self.start_time = 0.0
        self.attempts = 0
        self.results: list[TrialResult] = []

    def begin(self, sim_time: float) -> None:
        self.active = True
        self.start_time = sim_time
        self.attempts += 1


class TeleopRuntime:
    """One operator, one arm, one scene: the bridge between wire messages
    and the simulated world.

    deliver() validates and routes one message, returning the ack or error
    reply. tick() advances the world by exactly one control period. The
    surrounding transport (socket server, bench driver, demo replayer)
    decides when ticks happen; the runtime itself never watches a clock.
    """

    def __init__(self, chain: KinematicChain, scene: TaskScene,
                 config: LoopConfig | None = None, record_path=None):
        self.chain = chain
        self.scene = scene
        self.config = config or LoopConfig()
        self.state = initial_state(chain, scene)
        self.session = ControlSession()
        self.anchor = AnchorTransform.unanchored()
        self.progress = TaskProgress()
        self.mailbox = Mailbox()
        self.gate = SequenceGate()
        self.trial = _TrialBook()
        self.device: DeviceTwist | None = None
        self.ticks = 0
        self.last_message_time = -np.inf
        self.messages_accepted = 0
        self.outbox: list[WireMessage] = []
        self._out_seq = 0
        self.recorder = None
        if record_path is not None:
            self.recorder = DemoWriter(
                record_path, chain, scene, self.state.joints.positions, self.config
            )

    # -- message intake ----------------------------------------------------

    def reset_gate(self) -> None:
        """New connection, new seq stream."""
        self.gate = SequenceGate()

    def deliver_raw(self, raw: str) -> WireMessage:
        try:
            msg = parse_message(raw)
        except ProtocolError as e:
            return error_message(_salvage_seq(raw), self.state.sim_time, "bad_message", str(e))
        return self.deliver(msg)

    def deliver(self, msg: WireMessage) -> WireMessage:
        """Route one client message; returns the ack or error reply.

        Continuous inputs (pose targets, device twists, gripper, speed mode)
        are queued latest-wins and take effect on the next tick; anchoring
        and task control apply immediately so their replies can carry
        results. A rejected message consumes its seq but has no effect.
        """
        now = self.state.sim_time
        try:
            self.gate.admit(msg.seq)
        except ProtocolError as e:
            return error_message(msg.seq, now, "bad_seq", str(e))
        if msg.type not in CLIENT_TYPES:
            return error_message(
                msg.seq, now, "unknown_type", f"cannot route message type '{msg.type}'"
            )
        try:
            payload = validate_payload(msg.type, msg.payload)
        except ProtocolError as e:
            return error_message(msg.seq, now, "bad_payload", str(e))

        info = None
        if msg.type == "pose_target" and payload["engaged"] and not self.anchor.anchored:
            return error_message(
                msg.seq, now, "not_anchored",
                "engagement requires registration; send an anchor message first",
            )
        if msg.type == "anchor":
            try:
                self.anchor = register(payload["pairs"])
            except (RegistrationError, DegenerateConfigurationError, ValueError) as e:
                return error_message(msg.seq, now, "registration_failed", str(e))
            info = {"residual": self.anchor.residual}
        elif msg.type == "task_control":
            err = self._task_control(payload)
            if err is not None:
                return error_message(msg.seq, now, "task_control", err)
        else:
            self.mailbox.put(WireMessage(msg.type, msg.seq, msg.timestamp, payload))

        self.messages_accepted += 1
        self.last_message_time = now
        return ack_message(msg.seq, now, info)

    def _task_control(self, payload: dict) -> str | None:
        if payload["task"] != self.scene.task:
            return f"unknown task '{payload['task']}' (serving '{self.scene.task}')"
        command = payload["command"]
        if command == "reset":
            self._restore_initial()
            self.trial.active = False
            return None
        if command == "second_attempt" and self.trial.active:
            self._finalize_trial(self.state.sim_time - self.trial.start_time)
        self._restore_initial()
        self.trial.begin(self.state.sim_time)
        return None

    def _restore_initial(self) -> None:
        # the sim clock keeps running across resets; only the world rewinds
        now = self.state.sim_time
        self.state = replace(initial_state(self.chain, self.scene), sim_time=now)
        self.progress = TaskProgress()
        self.session = replace(
            self.session, engaged=False, gripper=self.state.gripper
        )
        self.device = None

    # -- the control loop --------------------------------------------------

    def tick(self) -> None:
        """Advance one control period: drain inputs, evaluate the control
        law, solve IK, step the world, update task progress, broadcast."""
        for msg in self.mailbox.drain():
            self._apply(msg)
        self._check_watchdog()

        twist = self._commanded_twist()
        try:
            qdot = _twist_to_qdot(
                self.chain, self.state.joints.positions, twist, self.config.damping
            )
        except SingularityError as e:
            qdot = np.zeros(self.chain.n)
            twist = Twist.zero()
            self._broadcast(error_message(
                0, self.state.sim_time, "singularity", f"zero-twist tick: {e}"
            ))
        self.state = step(self.chain, self.state, qdot, self.config.dt)
        self.progress = advance_task(self.scene, self.state, self.progress)
        self._check_trial()
        self.ticks += 1

        if self.recorder is not None:
            self.recorder.record_tick(
                self.ticks - 1, self.state, twist, self.session, self.scene.task
            )
        b, c = self.config.broadcast_rate, self.config.control_rate
        if int(self.ticks * b / c) > int((self.ticks - 1) * b / c):
            self._broadcast(self.state_message())

    def run(self, duration: float) -> int:
        """Run floor(duration * control_rate) ticks of simulated time."""
        n = int(np.floor(duration * self.config.control_rate + 1e-9))
        for _ in range(n):
            self.tick()
        return n

    def _apply(self, msg: WireMessage) -> None:
        p = msg.payload
        if msg.type == "speed_mode":
            self.session = set_speed_mode(self.session, SpeedMode(p["mode"]))
        elif msg.type == "gripper":
            ev = GripperEvent(GripperSource(p["source"]), GripperAction(p["action"]))
            self.session = apply_gripper_event(self.session, ev)
            if self.session.gripper is not self.state.gripper:
                self.state = replace(self.state, gripper=self.session.gripper)
                self.state = grasp_check(self.state, self.scene)
        elif msg.type == "pose_target":
            if self.anchor.anchored:
                target = Pose(p["position"], p["orientation"])
                mapped = anchor_apply(self.anchor, target)
                self.session = update_target(
                    self.session, mapped, p["engaged"], msg.timestamp
                )
            else:
                # deliver() rejects engaged targets while unanchored; a
                # disengaged one can still clear engagement
                self.session = update_target(
                    self.session, self.session.target, False, msg.timestamp
                )
        elif msg.type == "device_twist":
            self.device = DeviceTwist(p["translation"], p["rotation"], p["button"])

    def _commanded_twist(self) -> Twist:
        # An engaged pose target owns the arm; otherwise the latest device
        # twist (zero once the operator releases the cap) drives it.
        if self.session.engaged:
            return control_tick(self.session, self.state.tool_pose, self.config.limits)
        if self.device is not None:
            return spacemouse_to_twist(
                self.device, self.state.tool_pose.orientation,
                self.config.limits, self.session.speed_mode,
            )
        return Twist.zero()

    def disengage(self) -> None:
        """Halt commanded motion: drop engagement and any live device twist.
        Used when input goes stale or the operator connection drops."""
        if self.session.engaged:
            self.session = replace(self.session, engaged=False)
        self.device = None

    def _check_watchdog(self) -> None:
        w = self.config.watchdog
        if w is None:
            return
        if self.state.sim_time - self.last_message_time <= w:
            return
        self.disengage()

    def _check_trial(self) -> None:
        if not self.trial.active:
            return
        elapsed = self.state.sim_time - self.trial.start_time
        if self.progress.cleared == len(self.scene.checkpoints):
            self._finalize_trial(self.progress.clear_times[-1] - self.trial.start_time)
        elif elapsed >= self.scene.time_limit:
            self._finalize_trial(elapsed)

    def _finalize_trial(self, elapsed: float) -> None:
        self.trial.results.append(score_trial(
            self.progress, elapsed, self.scene, attempts=self.trial.attempts
        ))
        self.trial.active = False

    def final_result(self) -> TrialResult:
        """Best finished trial; an untracked run is scored from progress."""
        if self.trial.active:
            self._finalize_trial(self.state.sim_time - self.trial.start_time)
        if self.trial.results:
            return best_trial(self.trial.results)
        complete = self.progress.cleared == len(self.scene.checkpoints)
        elapsed = self.progress.clear_times[-1] if complete else self.state.sim_time
        return score_trial(self.progress, elapsed, self.scene,
                           attempts=max(1, self.trial.attempts))

    # -- outbound ----------------------------------------------------------

    def _broadcast(self, msg: WireMessage) -> None:
        self.outbox.append(msg)

    def take_outbox(self) -> list[WireMessage]:
        out, self.outbox = self.outbox, []
        return out

    def state_message(self) -> WireMessage:
        self._out_seq += 1
        last = self.trial.results[-1] if self.trial.results else None
        payload = {
            "time": self.state.sim_time,
            "joints": self.state.joints.positions.tolist(),
            "tool": {
                "position": self.state.tool_pose.position.tolist(),
                "orientation": self.state.tool_pose.orientation.tolist(),
            },
            "gripper": self.state.gripper.value,
            "engaged": self.session.engaged,
            "speed_mode": self.session.speed_mode.value,
            "task_progress": {
                "task": self.scene.task,
                "cleared": self.progress.cleared,
                "total": len(self.scene.checkpoints),
                "trial_active": self.trial.active,
                "attempts": self.trial.attempts,
                "score": last.score if last is not None else None,
            },
            "anchored": self.anchor.anchored,
            "held": self.state.held_object,
            "objects": {
                oid: {
                    "position": pose.position.tolist(),
                    "orientation": pose.orientation.tolist(),
                }
                for oid, pose in self.state.object_poses.items()
            },
            "stale_drops": self.session.stale_drops,
            "clamp_events": self.state.clamp_events,
        }
        return WireMessage("state", self._out_seq, self.state.sim_time, payload)

    def config_message(self) -> WireMessage:
        """Connection greeting: everything a UI needs to render and plan."""
        self._out_seq += 1
        limits = self.config.limits
        return WireMessage("config", self._out_seq, self.state.sim_time, {
            "chain": chain_to_dict(self.chain),
            "scene": scene_to_dict(self.scene),
            "control_rate": self.config.control_rate,
            "broadcast_rate": self.config.broadcast_rate,
            "limits": {
                "v_max": limits.v_max,
                "w_max": limits.w_max,
                "slow_factor": limits.slow_factor,
                "ramp_radius": limits.ramp_radius,
                "ramp_angle": limits.ramp_angle,
            },
            "watchdog": self.config.watchdog,
        })

    def close(self) -> None:
        if self.recorder is not None:
            self.recorder.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _salvage_seq(raw: str) -> int:
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, TypeError):
        return 0
    seq = doc.get("seq") if isinstance(doc, dict) else None
    return seq if isinstance(seq, int) and not isinstance(seq, bool) else 0


# ---------------------------------------------------------------------------
# Headless benchmarking
# ---------------------------------------------------------------------------


def run_bench(chain: KinematicChain, scene: TaskScene, traj: ScriptedTrajectory,
              config: LoopConfig | None = None, record_path=None) -> dict:
    """Replay a scripted trajectory against a scene and score the run.

    Simulated time only; the watchdog is off by default so sparse scripted
    input behaves like an attentive operator. Stops early once the task is
    complete and the script is exhausted, otherwise runs out the scene's
    time limit.
    """
    config = config or LoopConfig(watchdog=None)
    runtime = TeleopRuntime(chain, scene, config=config, record_path=record_path)
    rate = config.control_rate
    dt = config.dt
    total = int(np.floor(scene.time_limit * rate + 1e-9))
    delivered = 0
    errors = []
    events = traj.events
    with runtime:
        for k in range(total):
            t_k = k * dt
            while delivered < len(events) and events[delivered].timestamp <= t_k + 1e-12:
                reply = runtime.deliver(events[delivered])
                if reply.type == "error":
                    errors.append({"seq": events[delivered].seq, **reply.payload})
                delivered += 1
            runtime.tick()
            if (delivered == len(events)
                    and runtime.progress.cleared == len(scene.checkpoints)):
                break
        result = runtime.final_result()
    return {
        "task": result.task,
        "score": result.score,
        "elapsed": result.elapsed,
        "attempts": result.attempts,
        "checkpoints_cleared": runtime.progress.cleared,
        "checkpoints_total": len(scene.checkpoints),
        "ticks": runtime.ticks,
        "events_delivered": delivered,
        "errors": errors,
        "clamp_events": runtime.state.clamp_events,
    }
