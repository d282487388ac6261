"""Drive the arm onto a pose target and watch it converge.

Engages a target 12 cm from the start pose, runs three simulated seconds,
and prints how the position error collapses: a straight saturated approach,
then exponential decay once inside the 5 cm ramp region.
"""

import numpy as np

from teleosim import (
    LoopConfig,
    TeleopRuntime,
    WireMessage,
    builtin_scene,
    default_chain,
    forward_kinematics,
)

IDENTITY_PAIRS = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.2, 0.0, 0.0], [0.2, 0.0, 0.0]],
    [[0.0, 0.2, 0.0], [0.0, 0.2, 0.0]],
    [[0.0, 0.0, 0.2], [0.0, 0.0, 0.2]],
]


def main():
    chain = default_chain()
    scene = builtin_scene("POUR")
    start = forward_kinematics(chain, scene.start_joints)
    target = start.position + np.array([0.12, 0.0, 0.0])

    with TeleopRuntime(chain, scene, LoopConfig(watchdog=None)) as rt:
        rt.deliver(WireMessage("anchor", 1, 0.0, {"pairs": IDENTITY_PAIRS}))
        rt.deliver(WireMessage("pose_target", 2, 0.0, {
            "position": target.tolist(),
            "orientation": start.orientation.tolist(),
            "engaged": True,
        }))
        print(f"target {np.round(target, 3).tolist()}, caps 0.0625 m/s / 0.25 rad/s")
        print(f"{'t [s]':>6}  {'error [mm]':>10}  {'speed [mm/s]':>12}")
        for _ in range(15):
            rt.run(0.2)
            err = np.linalg.norm(rt.state.tool_pose.position - target)
            speed = np.linalg.norm(rt.state.tool_twist.linear)
            print(f"{rt.state.sim_time:6.1f}  {1e3 * err:10.2f}  {1e3 * speed:12.2f}")


if __name__ == "__main__":
    main()
