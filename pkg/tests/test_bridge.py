"""Runtime message routing, control loop, trials, demos, and benchmarking."""

import json

import numpy as np
import pytest

from teleosim.bridge import (
    DemoLog,
    LoopConfig,
    Mailbox,
    TeleopRuntime,
    load_demo,
    replay_demo,
    run_bench,
    verify_demo,
)
from teleosim.control import GripperState, SpeedMode
from teleosim.errors import TrajectoryFormatError
from teleosim.geometry import Pose
from teleosim.inputs import ScriptedTrajectory
from teleosim.kinematics import (
    chain_from_dict,
    default_chain,
    forward_kinematics,
)
from teleosim.protocol import WireMessage
from teleosim.sim import (
    Checkpoint,
    GraspZone,
    SceneObject,
    TaskScene,
    builtin_scene,
    initial_state,
)

CHAIN = default_chain()
POUR = builtin_scene("POUR")
START_TOOL = forward_kinematics(CHAIN, POUR.start_joints)

ANCHOR_PAIRS = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.2, 0.0, 0.0], [0.2, 0.0, 0.0]],
    [[0.0, 0.2, 0.0], [0.0, 0.2, 0.0]],
    [[0.0, 0.0, 0.2], [0.0, 0.0, 0.2]],
]

NO_WATCHDOG = LoopConfig(watchdog=None)


class Client:
    """Sends well-formed messages with fresh seq numbers and sim timestamps."""

    def __init__(self, runtime):
        self.runtime = runtime
        self.seq = 0

    def send(self, msg_type, payload, ts=None):
        self.seq += 1
        if ts is None:
            ts = self.runtime.ticks * self.runtime.config.dt
        return self.runtime.deliver(WireMessage(msg_type, self.seq, ts, payload))

    def anchor(self):
        return self.send("anchor", {"pairs": ANCHOR_PAIRS})

    def pose_target(self, position, engaged=True, ts=None):
        return self.send("pose_target", {
            "position": list(position),
            "orientation": START_TOOL.orientation.tolist(),
            "engaged": engaged,
        }, ts=ts)


def mini_scene(**overrides):
    fields = dict(
        task="MINI",
        checkpoints=(Checkpoint("home", START_TOOL, 0.01, 0.1,
                                GripperState.OPEN, None),),
        grasp_zones=(),
        objects=(),
        start_joints=POUR.start_joints,
        time_limit=2.0,
    )
    fields.update(overrides)
    return TaskScene(**fields)


# ---------------------------------------------------------------------------
# Message intake
# ---------------------------------------------------------------------------


def test_ack_echoes_seq():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = Client(rt).anchor()
        assert reply.type == "ack"
        assert reply.seq == 1
        assert reply.payload["seq"] == 1
        assert reply.payload["info"]["residual"] == pytest.approx(0.0, abs=1e-12)
        assert rt.anchor.anchored


def test_engaged_target_requires_anchor():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        reply = c.pose_target(START_TOOL.position + [0.1, 0, 0])
        assert reply.type == "error"
        assert reply.payload["code"] == "not_anchored"
        c.anchor()
        assert c.pose_target(START_TOOL.position + [0.1, 0, 0]).type == "ack"


def test_disengaged_target_allowed_without_anchor():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = Client(rt).pose_target(START_TOOL.position, engaged=False)
        assert reply.type == "ack"


def test_duplicate_seq_rejected():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        rt.deliver(WireMessage("speed_mode", 5, 0.0, {"mode": "slow"}))
        reply = rt.deliver(WireMessage("speed_mode", 5, 0.1, {"mode": "normal"}))
        assert reply.type == "error"
        assert reply.payload["code"] == "bad_seq"
        reply = rt.deliver(WireMessage("speed_mode", 4, 0.2, {"mode": "normal"}))
        assert reply.payload["code"] == "bad_seq"
        assert rt.deliver(WireMessage("speed_mode", 6, 0.3, {"mode": "normal"})).type == "ack"


def test_rejected_message_consumes_its_seq():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = rt.deliver(WireMessage("speed_mode", 1, 0.0, {"mode": "warp"}))
        assert reply.payload["code"] == "bad_payload"
        # seq 1 is spent even though the message was rejected
        reply = rt.deliver(WireMessage("speed_mode", 1, 0.1, {"mode": "slow"}))
        assert reply.payload["code"] == "bad_seq"
        assert rt.deliver(WireMessage("speed_mode", 2, 0.2, {"mode": "slow"})).type == "ack"


def test_unknown_type_keeps_session_alive():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = rt.deliver(WireMessage("warp_drive", 1, 0.0, {}))
        assert reply.type == "error"
        assert reply.payload["code"] == "unknown_type"
        assert rt.deliver(WireMessage("speed_mode", 2, 0.1, {"mode": "slow"})).type == "ack"


def test_bad_payload_names_field():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = rt.deliver(WireMessage("pose_target", 1, 0.0, {
            "position": [0, 0], "orientation": [1, 0, 0, 0], "engaged": False,
        }))
        assert reply.payload["code"] == "bad_payload"
        assert "position" in reply.payload["detail"]


def test_deliver_raw_salvages_seq():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = rt.deliver_raw("this is not json")
        assert reply.type == "error"
        assert reply.payload["code"] == "bad_message"
        assert reply.seq == 0
        reply = rt.deliver_raw(json.dumps({"type": "pose_target", "seq": 9,
                                           "timestamp": 0.0, "payload": {}}))
        assert reply.payload["code"] == "bad_message"
        assert reply.seq == 9


def test_degenerate_anchor_rejected():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        line = [[[float(i), 0.0, 0.0], [float(i), 0.0, 0.0]] for i in range(4)]
        reply = Client(rt).send("anchor", {"pairs": line})
        assert reply.type == "error"
        assert reply.payload["code"] == "registration_failed"
        assert not rt.anchor.anchored


def test_gate_reset_for_new_connection():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        rt.deliver(WireMessage("speed_mode", 10, 0.0, {"mode": "slow"}))
        rt.reset_gate()
        assert rt.deliver(WireMessage("speed_mode", 1, 0.1, {"mode": "normal"})).type == "ack"


# ---------------------------------------------------------------------------
# Control loop behavior
# ---------------------------------------------------------------------------


def test_run_tick_counts():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        assert rt.run(1.0) == 50
        assert rt.run(0.999) == 49
        assert rt.ticks == 99
        assert rt.state.sim_time == pytest.approx(99 * 0.02, abs=1e-12)


def test_idle_runtime_does_not_move():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        q0 = rt.state.joints.positions.copy()
        rt.run(0.5)
        assert np.array_equal(rt.state.joints.positions, q0)


def test_engaged_target_drives_arm():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.2, 0.0, 0.0])
        rt.run(1.0)
        moved = rt.state.tool_pose.position - START_TOOL.position
        assert moved[0] > 0.05
        assert abs(moved[1]) < 0.01 and abs(moved[2]) < 0.01


def test_release_halts_within_one_tick():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0])
        rt.run(1.0)
        assert not rt.state.tool_twist.is_zero()
        c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0], engaged=False)
        rt.tick()
        assert np.all(rt.state.joints.velocities == 0.0)
        assert rt.state.tool_twist.is_zero()


def test_latest_target_wins_within_tick():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0])
        c.pose_target(START_TOOL.position + [0.0, 0.3, 0.0])
        rt.tick()
        assert np.allclose(rt.session.target.position,
                           START_TOOL.position + [0.0, 0.3, 0.0], atol=1e-12)
        moved = rt.state.tool_pose.position - START_TOOL.position
        assert moved[1] > 1e-4          # chased the +y target...
        assert abs(moved[0]) < 0.2 * moved[1]  # ...not the discarded +x one


def test_device_twist_drives_and_releases():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.send("device_twist", {"translation": [1.0, 0.0, 0.0],
                                "rotation": [0.0, 0.0, 0.0], "button": False})
        rt.run(0.5)
        moved = rt.state.tool_pose.position - START_TOOL.position
        assert moved[0] > 0.02
        c.send("device_twist", {"translation": [0.0, 0.0, 0.0],
                                "rotation": [0.0, 0.0, 0.0], "button": False})
        rt.tick()
        assert np.all(rt.state.joints.velocities == 0.0)


def test_engaged_target_outranks_device_twist():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.anchor()
        c.send("device_twist", {"translation": [-1.0, 0.0, 0.0],
                                "rotation": [0.0, 0.0, 0.0], "button": False})
        c.pose_target(START_TOOL.position + [0.2, 0.0, 0.0])
        rt.run(0.5)
        assert (rt.state.tool_pose.position - START_TOOL.position)[0] > 0.01


def test_speed_and_gripper_apply_on_tick():
    scene = mini_scene(
        grasp_zones=(GraspZone("cube", 0.05),),
        objects=(SceneObject("cube", Pose(START_TOOL.position + [0.0, 0.0, 0.01],
                                          [1, 0, 0, 0])),),
    )
    with TeleopRuntime(CHAIN, scene, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.send("speed_mode", {"mode": "slow"})
        c.send("gripper", {"action": "close", "source": "button"})
        assert rt.session.speed_mode is SpeedMode.NORMAL  # not yet applied
        rt.tick()
        assert rt.session.speed_mode is SpeedMode.SLOW
        assert rt.state.gripper is GripperState.CLOSED
        assert rt.state.held_object == "cube"
        c.send("gripper", {"action": "open", "source": "voice"})
        rt.tick()
        assert rt.state.gripper is GripperState.OPEN
        assert rt.state.held_object is None


def test_slow_mode_halves_nothing_but_scales_by_third():
    cfg = LoopConfig(watchdog=None)
    with TeleopRuntime(CHAIN, POUR, cfg) as rt:
        c = Client(rt)
        c.anchor()
        c.send("speed_mode", {"mode": "slow"})
        c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0])
        rt.run(1.0)
        fast_expected = 0.0625
        moved = np.linalg.norm(rt.state.tool_pose.position - START_TOOL.position)
        assert moved == pytest.approx(fast_expected / 3.0, rel=0.05)


def test_watchdog_disengages_stale_session():
    cfg = LoopConfig(watchdog=0.5)
    with TeleopRuntime(CHAIN, POUR, cfg) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0])
        rt.run(1.0)  # silence after t=0; watchdog fires at 0.5 s
        assert not rt.session.engaged
        assert rt.state.tool_twist.is_zero()
        moved = np.linalg.norm(rt.state.tool_pose.position - START_TOOL.position)
        assert 0.025 < moved < 0.040  # about half the full-second displacement


def test_watchdog_fed_by_fresh_messages():
    cfg = LoopConfig(watchdog=0.5)
    with TeleopRuntime(CHAIN, POUR, cfg) as rt:
        c = Client(rt)
        c.anchor()
        for k in range(5):
            c.pose_target(START_TOOL.position + [0.3, 0.0, 0.0])
            rt.run(0.4)
        assert rt.session.engaged
        moved = np.linalg.norm(rt.state.tool_pose.position - START_TOOL.position)
        assert moved > 0.1


def test_broadcast_cadence():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        rt.run(1.0)
        states = [m for m in rt.take_outbox() if m.type == "state"]
        assert len(states) == 20
        assert rt.take_outbox() == []


def test_state_message_contents():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        Client(rt).anchor()
        rt.run(0.1)
        msg = rt.state_message()
        p = msg.payload
        assert p["time"] == pytest.approx(0.1, abs=1e-12)
        assert len(p["joints"]) == CHAIN.n
        assert p["gripper"] == "open"
        assert p["engaged"] is False
        assert p["anchored"] is True
        assert p["task_progress"]["task"] == "POUR"
        assert p["task_progress"]["total"] == len(POUR.checkpoints)
        assert "cup" in p["objects"]
        assert p["stale_drops"] == 0


def test_config_message_contents():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        p = rt.config_message().payload
        assert p["control_rate"] == 50.0
        assert p["limits"]["v_max"] == 0.0625
        assert p["limits"]["w_max"] == 0.25
        assert p["scene"]["id"] == "POUR"
        assert len(p["chain"]["joints"]) == CHAIN.n
        assert p["watchdog"] is None
        clone = chain_from_dict(p["chain"])
        assert clone.n == CHAIN.n


def test_singular_tick_reports_and_freezes():
    joint = {
        "axis": [0, 0, 1],
        "offset": {"position": [0, 0, 0], "orientation": [1, 0, 0, 0]},
        "limits": [-6.28, 6.28],
        "velocity_limit": 1.0,
    }
    doc = {
        "name": "degenerate",
        "joints": [joint, dict(joint)],  # coincident axes: rank-1 jacobian
        "tool": {"position": [0.3, 0, 0], "orientation": [1, 0, 0, 0]},
    }
    chain = chain_from_dict(doc)
    tool = forward_kinematics(chain, np.zeros(2))
    scene = TaskScene(
        task="MINI",
        checkpoints=(Checkpoint("cp", Pose([9, 9, 9], [1, 0, 0, 0]), 0.01, 0.1,
                                GripperState.OPEN, None),),
        grasp_zones=(), objects=(), start_joints=np.zeros(2), time_limit=2.0,
    )
    cfg = LoopConfig(watchdog=None, damping=0.0)
    with TeleopRuntime(chain, scene, cfg) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(tool.position + [0.1, 0.0, 0.0])
        q0 = rt.state.joints.positions.copy()
        rt.tick()
        errors = [m for m in rt.take_outbox() if m.type == "error"]
        assert errors and errors[0].payload["code"] == "singularity"
        assert np.array_equal(rt.state.joints.positions, q0)


# ---------------------------------------------------------------------------
# Trials and task control
# ---------------------------------------------------------------------------


def test_task_control_rejects_other_task():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        reply = Client(rt).send("task_control", {"task": "BOOKSHELF", "command": "start"})
        assert reply.type == "error"
        assert reply.payload["code"] == "task_control"


def test_trial_completes_with_score():
    scene = mini_scene()
    with TeleopRuntime(CHAIN, scene, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.send("task_control", {"task": "MINI", "command": "start"})
        assert rt.trial.active
        assert rt.trial.attempts == 1
        rt.run(0.1)  # checkpoint is satisfied at the start pose
        assert not rt.trial.active
        result = rt.final_result()
        assert result.score == 100
        assert result.attempts == 1
        assert result.elapsed <= 0.1


def test_trial_times_out_at_limit():
    scene = mini_scene(checkpoints=(
        Checkpoint("far", Pose([9, 9, 9], [1, 0, 0, 0]), 0.01, 0.1,
                   GripperState.OPEN, None),
    ))
    with TeleopRuntime(CHAIN, scene, NO_WATCHDOG) as rt:
        Client(rt).send("task_control", {"task": "MINI", "command": "start"})
        rt.run(2.5)
        assert not rt.trial.active
        result = rt.final_result()
        assert result.score == 0
        assert result.elapsed == scene.time_limit


def test_reset_rewinds_world_not_clock():
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.2, 0.0, 0.0])
        rt.run(1.0)
        assert not np.array_equal(rt.state.joints.positions, POUR.start_joints)
        c.send("task_control", {"task": "POUR", "command": "reset"})
        assert np.array_equal(rt.state.joints.positions, POUR.start_joints)
        assert rt.state.sim_time == pytest.approx(1.0, abs=1e-12)
        assert not rt.session.engaged
        assert rt.progress.cleared == 0
        rt.tick()  # keeps ticking cleanly after the rewind
        assert rt.state.sim_time == pytest.approx(1.02, abs=1e-12)


def test_second_attempt_finalizes_first():
    scene = mini_scene(checkpoints=(
        Checkpoint("far", Pose([9, 9, 9], [1, 0, 0, 0]), 0.01, 0.1,
                   GripperState.OPEN, None),
    ))
    with TeleopRuntime(CHAIN, scene, NO_WATCHDOG) as rt:
        c = Client(rt)
        c.send("task_control", {"task": "MINI", "command": "start"})
        rt.run(0.5)
        c.send("task_control", {"task": "MINI", "command": "second_attempt"})
        assert len(rt.trial.results) == 1
        assert rt.trial.results[0].score == 0
        assert rt.trial.active
        assert rt.trial.attempts == 2


# ---------------------------------------------------------------------------
# Demonstration recording and replay
# ---------------------------------------------------------------------------


def record_short_demo(path):
    with TeleopRuntime(CHAIN, POUR, NO_WATCHDOG, record_path=path) as rt:
        c = Client(rt)
        c.anchor()
        c.pose_target(START_TOOL.position + [0.15, 0.05, -0.02])
        rt.run(0.5)
        c.send("gripper", {"action": "close", "source": "button"})
        c.pose_target(START_TOOL.position + [0.15, 0.05, -0.02], engaged=False)
        rt.run(0.1)
        return rt.state.joints.positions.copy()


def test_demo_records_and_replays_bitwise(tmp_path):
    path = tmp_path / "demo.jsonl"
    final_q = record_short_demo(path)
    log = load_demo(path)
    assert log.header.task == "POUR"
    assert log.header.control_rate == 50.0
    assert len(log.ticks) == 30
    assert log.ticks[0].tick == 0
    verdict = verify_demo(log)
    assert verdict.ticks == 30
    assert verdict.bitwise_equal
    assert verdict.max_joint_error == 0.0
    assert np.array_equal(replay_demo(log)[-1], final_q)


def test_demo_captures_session_flags(tmp_path):
    path = tmp_path / "demo.jsonl"
    record_short_demo(path)
    log = load_demo(path)
    assert log.ticks[0].engaged
    assert not log.ticks[-1].engaged
    assert log.ticks[-1].gripper == "closed"
    assert all(t.task == "POUR" for t in log.ticks)


def test_empty_demo_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    log = load_demo(path)
    assert log.header is None
    assert log.ticks == ()
    assert replay_demo(log) == []
    verdict = verify_demo(log)
    assert verdict.ticks == 0 and verdict.bitwise_equal


def test_demo_truncated_line_reports_lineno(tmp_path):
    path = tmp_path / "demo.jsonl"
    record_short_demo(path)
    lines = path.read_text().splitlines()
    lines[3] = lines[3][: len(lines[3]) // 2]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TrajectoryFormatError) as exc:
        load_demo(path)
    assert exc.value.line == 4


def test_demo_requires_header_first(tmp_path):
    path = tmp_path / "headless.jsonl"
    src = tmp_path / "demo.jsonl"
    record_short_demo(src)
    path.write_text(src.read_text().split("\n", 1)[1])
    with pytest.raises(TrajectoryFormatError) as exc:
        load_demo(path)
    assert exc.value.line == 1


def test_demo_rejects_tick_regression(tmp_path):
    path = tmp_path / "demo.jsonl"
    record_short_demo(path)
    lines = path.read_text().splitlines()
    lines.append(lines[1])  # replays tick 0 after tick 29
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TrajectoryFormatError) as exc:
        load_demo(path)
    assert exc.value.line == len(lines)


def test_demo_missing_field_reports_lineno(tmp_path):
    path = tmp_path / "demo.jsonl"
    record_short_demo(path)
    lines = path.read_text().splitlines()
    doc = json.loads(lines[2])
    del doc["joints"]
    lines[2] = json.dumps(doc)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TrajectoryFormatError) as exc:
        load_demo(path)
    assert exc.value.line == 3
    assert "joints" in str(exc.value)


# ---------------------------------------------------------------------------
# Benchmarking
# ---------------------------------------------------------------------------


def test_bench_scores_immediate_completion():
    report = run_bench(CHAIN, mini_scene(), ScriptedTrajectory(()))
    assert report["score"] == 100
    assert report["checkpoints_cleared"] == 1
    assert report["ticks"] == 1  # stops as soon as the task is complete
    assert report["errors"] == []


def test_bench_times_out_without_input():
    scene = mini_scene(checkpoints=(
        Checkpoint("far", Pose([9, 9, 9], [1, 0, 0, 0]), 0.01, 0.1,
                   GripperState.OPEN, None),
    ))
    report = run_bench(CHAIN, scene, ScriptedTrajectory(()))
    assert report["score"] == 0
    assert report["elapsed"] == scene.time_limit
    assert report["ticks"] == 100  # 2 s at 50 Hz, ran to the limit


def test_bench_partial_score():
    near = Checkpoint("near", START_TOOL, 0.01, 0.1, GripperState.OPEN, None)
    far = Checkpoint("far", Pose([9, 9, 9], [1, 0, 0, 0]), 0.01, 0.1,
                     GripperState.OPEN, None)
    scene = mini_scene(checkpoints=(near, far), partial_threshold=1)
    report = run_bench(CHAIN, scene, ScriptedTrajectory(()))
    assert report["score"] == 50
    assert report["checkpoints_cleared"] == 1
    assert report["elapsed"] == scene.time_limit


def test_bench_collects_errors():
    bad = WireMessage("pose_target", 1, 0.0, {
        "position": [0.4, 0.0, 0.4],
        "orientation": [1.0, 0.0, 0.0, 0.0],
        "engaged": True,  # no anchor registered
    })
    report = run_bench(CHAIN, mini_scene(), ScriptedTrajectory((bad,)))
    assert report["errors"] and report["errors"][0]["code"] == "not_anchored"
    assert report["events_delivered"] == 1


def test_bench_records_demo(tmp_path):
    path = tmp_path / "bench.jsonl"
    run_bench(CHAIN, mini_scene(), ScriptedTrajectory(()), record_path=path)
    log = load_demo(path)
    assert log.header.task == "MINI"
    assert verify_demo(log).bitwise_equal


# ---------------------------------------------------------------------------
# Config and mailbox units
# ---------------------------------------------------------------------------


def test_loop_config_validation():
    with pytest.raises(ValueError):
        LoopConfig(control_rate=0)
    with pytest.raises(ValueError):
        LoopConfig(broadcast_rate=100.0)  # above the control rate
    with pytest.raises(ValueError):
        LoopConfig(watchdog=0.0)
    assert LoopConfig(watchdog=None).watchdog is None
    assert LoopConfig().dt == pytest.approx(0.02)


def test_mailbox_latest_wins_per_type():
    box = Mailbox()
    box.put(WireMessage("pose_target", 1, 0.0, {"n": 1}))
    box.put(WireMessage("speed_mode", 2, 0.0, {"mode": "slow"}))
    box.put(WireMessage("pose_target", 3, 0.1, {"n": 2}))
    assert len(box) == 2
    drained = box.drain()
    assert [m.type for m in drained] == ["speed_mode", "pose_target"]
    assert drained[1].payload == {"n": 2}
    assert box.drain() == []
