"""teleosim: a simulated 7-DOF teleoperation stack.

Pose-target and 6-axis-device control with capped twists, damped
least-squares velocity IK, operator-to-robot frame registration, scripted
benchmark tasks with scoring, demonstration recording with deterministic
replay, and a websocket bridge for interactive front ends.
"""

from .alignment import AnchorTransform, CorrespondenceSet, register
from .bridge import (
    DemoLog,
    DemoWriter,
    LoopConfig,
    TeleopRuntime,
    load_demo,
    replay_demo,
    run_bench,
    verify_demo,
)
from .control import (
    ControlSession,
    GripperAction,
    GripperEvent,
    GripperSource,
    GripperState,
    SpeedLimits,
    SpeedMode,
    compute_twist,
    control_tick,
)
from .errors import (
    DegenerateConfigurationError,
    NotAnchoredError,
    ProtocolError,
    RegistrationError,
    SingularityError,
    TrajectoryFormatError,
)
from .geometry import (
    Pose,
    Twist,
    quat_angle,
    quat_conjugate,
    quat_from_axis_angle,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
)
from .inputs import (
    DeviceTwist,
    ScriptedTrajectory,
    SphereInput,
    load_trajectory,
    save_trajectory,
    spacemouse_to_twist,
    sphere_to_target,
)
from .kinematics import (
    Joint,
    JointState,
    KinematicChain,
    default_chain,
    dls_velocity_ik,
    forward_kinematics,
    jacobian,
    load_chain,
    pose_error,
)
from .protocol import WireMessage, parse_message
from .sim import (
    SCENE_IDS,
    RobotState,
    TaskScene,
    TrialResult,
    advance_task,
    best_trial,
    builtin_scene,
    grasp_check,
    initial_state,
    load_scene,
    score_trial,
    step,
)

__version__ = "0.1.0"
