"""Author the packaged reference trajectories by driving the runtime.

For each benchmark scene this script plays operator: anchor, start the
task, then walk the checkpoints, sending pose targets and gripper events
and waiting for the controller to converge. Every message is stamped with
the tick boundary it was delivered at, so replaying the saved file through
the bench driver reproduces the exact same run; the script verifies that
claim (fresh runtime, score 100) before writing anything permanent.

Usage: python3 tools/gen_reference_trajectories.py
"""

import sys

import numpy as np

from teleosim.bridge import LoopConfig, TeleopRuntime, run_bench
from teleosim.control import GripperState
from teleosim.geometry import quat_angle, quat_conjugate, quat_multiply
from teleosim.inputs import ScriptedTrajectory, load_trajectory, save_trajectory
from teleosim.kinematics import default_chain
from teleosim.protocol import WireMessage
from teleosim.sim import builtin_scene

OUT_DIR = "src/teleosim/data/trajectories"
SCENES = ("POUR", "PEG_IN_HOLE", "RING_ON_PEG", "BOOKSHELF")

CHECKPOINT_BUDGET = 60.0   # s of simulated time before we call it a stall
CONVERGE_FRACTION = 0.6    # settle to this fraction of the tolerance

IDENTITY_PAIRS = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.3, 0.0, 0.0], [0.3, 0.0, 0.0]],
    [[0.0, 0.3, 0.0], [0.0, 0.3, 0.0]],
    [[0.0, 0.0, 0.3], [0.0, 0.0, 0.3]],
]


class Driver:
    """Plays the operator against a live runtime, logging what it sends."""

    def __init__(self, scene):
        self.chain = default_chain()
        self.scene = scene
        self.config = LoopConfig(watchdog=None)
        self.runtime = TeleopRuntime(self.chain, scene, config=self.config)
        self.events = []
        self.seq = 0

    def send(self, msg_type, payload):
        # one message per tick keeps trajectory timestamps strictly increasing
        ts = self.runtime.ticks * self.config.dt
        self.seq += 1
        msg = WireMessage(msg_type, self.seq, ts, payload)
        reply = self.runtime.deliver(msg)
        if reply.type != "ack":
            raise RuntimeError(f"{msg_type} rejected: {reply.payload}")
        self.events.append(msg)
        self.runtime.tick()

    def wait(self, predicate, what):
        start = self.runtime.state.sim_time
        while not predicate():
            if self.runtime.state.sim_time - start > CHECKPOINT_BUDGET:
                self.dump(what)
                raise RuntimeError(f"{self.scene.task}: stalled waiting for {what}")
            self.runtime.tick()

    def dump(self, what):
        st = self.runtime.state
        print(f"--- stall on {what} at t={st.sim_time:.2f}s", file=sys.stderr)
        print(f"    tool at {np.round(st.tool_pose.position, 4)}, "
              f"progress {self.runtime.progress.cleared}", file=sys.stderr)

    # -- operator moves ----------------------------------------------------

    def errors_to(self, checkpoint):
        st = self.runtime.state
        dp = float(np.linalg.norm(st.tool_pose.position - checkpoint.pose.position))
        dq = quat_multiply(checkpoint.pose.orientation,
                           quat_conjugate(st.tool_pose.orientation))
        return dp, quat_angle(dq)

    def goto(self, checkpoint):
        self.send("pose_target", {
            "position": checkpoint.pose.position.tolist(),
            "orientation": checkpoint.pose.orientation.tolist(),
            "engaged": True,
        })

        def near():
            dp, dth = self.errors_to(checkpoint)
            return (dp < CONVERGE_FRACTION * checkpoint.pos_tol
                    and dth < CONVERGE_FRACTION * checkpoint.ori_tol)

        self.wait(near, f"pose of '{checkpoint.name}'")

    def set_gripper(self, want: GripperState, style: str):
        if self.runtime.state.gripper is want:
            return
        if style == "double_tap":
            payload = {"action": "toggle", "source": "double_tap"}
        elif want is GripperState.CLOSED:
            payload = {"action": "close", "source": "button"}
        else:
            payload = {"action": "open", "source": "voice"}
        self.send("gripper", payload)

    def set_mode(self, mode: str):
        if self.runtime.session.speed_mode.value != mode:
            self.send("speed_mode", {"mode": mode})


def drive(scene) -> ScriptedTrajectory:
    d = Driver(scene)
    d.send("anchor", {"pairs": IDENTITY_PAIRS})
    d.send("task_control", {"task": scene.task, "command": "start"})

    for i, c in enumerate(scene.checkpoints):
        d.set_mode("slow" if c.max_angular_speed is not None else "normal")
        d.goto(c)
        if c.gripper is GripperState.CLOSED and c.held is not None:
            # sanity: the object must be inside its grasp zone before closing
            obj = d.runtime.state.object_poses[c.held]
            dist = float(np.linalg.norm(
                d.runtime.state.tool_pose.position - obj.position
            ))
            zone = next(z for z in scene.grasp_zones if z.object_id == c.held)
            if dist > zone.radius:
                raise RuntimeError(
                    f"{scene.task}: '{c.name}' would close {dist:.3f} m from "
                    f"'{c.held}' (zone {zone.radius} m)"
                )
        style = "double_tap" if c.name == "regrasp" else "default"
        d.set_gripper(c.gripper, style)
        d.wait(lambda: d.runtime.progress.cleared > i, f"checkpoint '{c.name}'")
        print(f"  [{scene.task}] {c.name:>18} cleared at "
              f"t={d.runtime.state.sim_time:6.2f}s")

    # release the controls; the arm must halt on its own
    st = d.runtime.state.tool_pose
    d.send("pose_target", {
        "position": st.position.tolist(),
        "orientation": st.orientation.tolist(),
        "engaged": False,
    })
    d.runtime.run(0.2)
    return ScriptedTrajectory(tuple(d.events))


def main():
    for sid in SCENES:
        scene = builtin_scene(sid)
        traj = drive(scene)
        path = f"{OUT_DIR}/{sid.lower()}.jsonl"
        save_trajectory(traj, path)

        # prove the file stands alone: fresh runtime, replayed from disk
        report = run_bench(default_chain(), builtin_scene(sid), load_trajectory(path))
        if report["score"] != 100 or report["errors"]:
            raise SystemExit(f"{sid}: replay verification failed: {report}")
        print(f"{sid}: wrote {len(traj.events)} events -> {path}; "
              f"bench score {report['score']} in {report['elapsed']:.2f}s "
              f"({report['ticks']} ticks)\n")


if __name__ == "__main__":
    main()
