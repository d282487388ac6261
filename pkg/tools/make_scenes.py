"""Author the four packaged benchmark scenes.

Checkpoint poses are computed against the packaged chain's start posture so
every region is reachable by construction; run this after changing the
chain or the scene layouts and commit the regenerated YAML.

Usage: python3 tools/make_scenes.py
"""

import numpy as np
import yaml

from teleosim.control import GripperState
from teleosim.geometry import Pose, quat_from_axis_angle, quat_multiply
from teleosim.kinematics import default_chain, forward_kinematics
from teleosim.sim import Checkpoint, GraspZone, SceneObject, TaskScene, scene_to_dict

START_JOINTS = [0.0, 0.35, 3.14159265, -1.25, 0.0, -1.0, 1.5707963]

OUT_DIR = "src/teleosim/data/scenes"


def rotated(base_quat, axis, angle):
    """Base-frame rotation of a tool orientation."""
    return quat_multiply(quat_from_axis_angle(axis, angle), base_quat)


def cp(name, position, orientation, pos_tol, ori_tol, gripper, held, max_w=None):
    return Checkpoint(
        name=name,
        pose=Pose(position, orientation),
        pos_tol=pos_tol,
        ori_tol=ori_tol,
        gripper=GripperState(gripper),
        held=held,
        max_angular_speed=max_w,
    )


def build_scenes():
    chain = default_chain()
    q0 = forward_kinematics(chain, np.array(START_JOINTS)).orientation

    scenes = []

    # POUR: grab the cup, carry it above the bowl, tilt slowly, level out,
    # set it back down. The tilt checkpoint caps the realized angular speed.
    cup = [0.55, -0.20, 0.42]
    pour_at = [0.52, 0.18, 0.58]
    place = [0.58, -0.02, 0.42]
    tilt = rotated(q0, [1.0, 0.0, 0.0], -1.2)
    scenes.append(TaskScene(
        task="POUR",
        checkpoints=(
            cp("approach_cup", cup, q0, 0.030, 0.30, "open", None),
            cp("grasp_cup", cup, q0, 0.030, 0.30, "closed", "cup"),
            cp("carry_to_bowl", pour_at, q0, 0.025, 0.20, "closed", "cup"),
            cp("pour_tilt", pour_at, tilt, 0.030, 0.15, "closed", "cup", max_w=0.12),
            cp("level_out", pour_at, q0, 0.030, 0.20, "closed", "cup"),
            cp("place_cup", place, q0, 0.030, 0.30, "closed", "cup"),
            cp("release", place, q0, 0.035, 0.35, "open", None),
        ),
        grasp_zones=(GraspZone("cup", 0.05),),
        objects=(
            SceneObject("cup", Pose(cup, q0)),
            SceneObject("bowl", Pose([0.52, 0.18, 0.40], q0)),
        ),
        start_joints=START_JOINTS,
        partial_threshold=3,
    ))

    # PEG_IN_HOLE: classic tight-tolerance insertion, 5 mm at the bottom.
    peg = [0.50, -0.15, 0.36]
    above = [0.50, 0.12, 0.46]
    seated = [0.50, 0.12, 0.375]
    scenes.append(TaskScene(
        task="PEG_IN_HOLE",
        checkpoints=(
            cp("approach_peg", peg, q0, 0.030, 0.30, "open", None),
            cp("grasp_peg", peg, q0, 0.030, 0.30, "closed", "peg"),
            cp("lift_clear", [0.50, -0.15, 0.48], q0, 0.030, 0.25, "closed", "peg"),
            cp("align_above_hole", above, q0, 0.015, 0.15, "closed", "peg"),
            cp("insert", seated, q0, 0.005, 0.10, "closed", "peg"),
            cp("release", seated, q0, 0.020, 0.25, "open", None),
        ),
        grasp_zones=(GraspZone("peg", 0.05),),
        objects=(
            SceneObject("peg", Pose(peg, q0)),
            SceneObject("hole_plate", Pose([0.50, 0.12, 0.38], q0)),
        ),
        start_joints=START_JOINTS,
        partial_threshold=3,
    ))

    # RING_ON_PEG: grab the roll, line up beside the horizontal peg with a
    # side-approach orientation, slide it on along the peg axis.
    roll = [0.46, -0.22, 0.45]
    pre = [0.46, 0.05, 0.50]
    on_peg = [0.46, 0.20, 0.50]
    side = rotated(q0, [0.0, 0.0, 1.0], -0.7)
    scenes.append(TaskScene(
        task="RING_ON_PEG",
        checkpoints=(
            cp("approach_roll", roll, q0, 0.030, 0.30, "open", None),
            cp("grasp_roll", roll, q0, 0.030, 0.30, "closed", "roll"),
            cp("pre_peg", pre, side, 0.020, 0.15, "closed", "roll"),
            cp("slide_on", on_peg, side, 0.015, 0.15, "closed", "roll"),
            cp("release", on_peg, side, 0.020, 0.30, "open", None),
        ),
        grasp_zones=(GraspZone("roll", 0.05),),
        objects=(
            SceneObject("roll", Pose(roll, q0)),
            SceneObject("peg_mount", Pose([0.46, 0.27, 0.50], q0)),
        ),
        start_joints=START_JOINTS,
        partial_threshold=2,
    ))

    # BOOKSHELF: place the book down at a staging point, let go, regrasp it
    # with a different approach orientation, then shelve it.
    book = [0.62, -0.12, 0.35]
    staging = [0.56, 0.04, 0.35]
    shelf = [0.50, 0.25, 0.62]
    regrip = rotated(q0, [0.0, 0.0, 1.0], 0.8)
    scenes.append(TaskScene(
        task="BOOKSHELF",
        checkpoints=(
            cp("approach_book", book, q0, 0.030, 0.30, "open", None),
            cp("grasp_book", book, q0, 0.030, 0.30, "closed", "book"),
            cp("stage", staging, q0, 0.020, 0.20, "closed", "book"),
            cp("set_down", staging, q0, 0.025, 0.25, "open", None),
            cp("re_approach", staging, regrip, 0.030, 0.15, "open", None),
            cp("regrasp", staging, regrip, 0.030, 0.15, "closed", "book"),
            cp("shelf_place", shelf, regrip, 0.015, 0.15, "closed", "book"),
            cp("release", shelf, regrip, 0.025, 0.30, "open", None),
        ),
        grasp_zones=(GraspZone("book", 0.06),),
        objects=(
            SceneObject("book", Pose(book, q0)),
            SceneObject("shelf_frame", Pose([0.50, 0.30, 0.62], q0)),
        ),
        start_joints=START_JOINTS,
        partial_threshold=3,
    ))

    return scenes


def main():
    for scene in build_scenes():
        path = f"{OUT_DIR}/{scene.task.lower()}.yaml"
        with open(path, "w") as f:
            yaml.safe_dump(scene_to_dict(scene), f, sort_keys=False)
        print(f"wrote {path}: {len(scene.checkpoints)} checkpoints, "
              f"partial at {scene.partial_threshold}")


if __name__ == "__main__":
    main()
