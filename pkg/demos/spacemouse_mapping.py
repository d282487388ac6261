"""The mixed reference frame of 6-axis device control, demonstrated.

Pushing the cap forward always moves the tool along the robot's +x no matter
how the wrist is turned, while twisting the cap always rolls the tool about
its own axis. The same stick sample is mapped at several tool orientations
to make both halves visible.
"""

import numpy as np

from teleosim import DeviceTwist, SpeedLimits, quat_from_axis_angle, spacemouse_to_twist


def show(label, ee_orientation, sample, limits):
    out = spacemouse_to_twist(sample, ee_orientation, limits)
    lin = np.round(out.linear, 4).tolist()
    ang = np.round(out.angular, 4).tolist()
    print(f"  {label:<28} linear {lin}  angular {ang}")


def main():
    limits = SpeedLimits()
    push = DeviceTwist([1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    twist = DeviceTwist([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    orientations = [
        ("tool at identity", [1.0, 0.0, 0.0, 0.0]),
        ("tool yawed 90 deg", quat_from_axis_angle([0, 0, 1], np.pi / 2)),
        ("tool pitched 45 deg", quat_from_axis_angle([0, 1, 0], np.pi / 4)),
    ]

    print("full forward push (translation axes live in the base frame):")
    for label, q in orientations:
        show(label, q, push, limits)

    print("full roll twist (rotation axes live in the tool frame):")
    for label, q in orientations:
        show(label, q, twist, limits)

    print("small deflections below the 0.02 deadband are dropped:")
    show("near-rest cap", [1.0, 0.0, 0.0, 0.0],
         DeviceTwist([0.015, 0.0, 0.0], [0.0, 0.01, 0.0]), limits)


if __name__ == "__main__":
    main()
