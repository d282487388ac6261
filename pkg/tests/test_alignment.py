"""Registration (anchoring) against closed-form and brute-force oracles."""

import math

import numpy as np
import pytest

from teleosim.alignment import (
    AnchorTransform,
    CorrespondenceSet,
    apply,
    apply_point,
    register,
)
from teleosim.errors import (
    DegenerateConfigurationError,
    NotAnchoredError,
    RegistrationError,
)
from teleosim.geometry import (
    Pose,
    quat_angle,
    quat_conjugate,
    quat_from_axis_angle,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
)

rng = np.random.default_rng(771203)


def random_quat():
    return quat_normalize(rng.normal(size=4))


def make_pairs(n, q, t, noise=0.0):
    a = rng.uniform(-0.5, 0.5, (n, 3))
    b = np.array([quat_rotate(q, p) for p in a]) + t
    if noise:
        b = b + rng.normal(scale=noise, size=b.shape)
    return a, b


# ---------------------------------------------------------------------------
# Exact recovery
# ---------------------------------------------------------------------------


def test_known_transforms_recovered():
    for _ in range(50):
        q, t = random_quat(), rng.uniform(-1, 1, 3)
        a, b = make_pairs(6, q, t)
        anchor = register(CorrespondenceSet(a, b))
        assert anchor.anchored
        d = quat_multiply(quat_conjugate(anchor.rotation), q)
        assert quat_angle(d) < 1e-9
        assert np.linalg.norm(anchor.translation - t) < 1e-9
        assert anchor.residual < 1e-9


def test_square_corner_gesture_recovers_transform():
    # the anchoring gesture: four corners of a square, planar but not collinear
    q = quat_from_axis_angle([0.3, -0.2, 0.9], 1.1)
    t = np.array([0.4, -0.1, 0.3])
    corners = np.array([[0, 0, 0], [0.2, 0, 0], [0.2, 0.2, 0], [0, 0.2, 0]], float)
    measured = np.array([quat_rotate(q, c) for c in corners]) + t
    anchor = register(CorrespondenceSet(corners, measured))
    assert quat_angle(quat_multiply(quat_conjugate(anchor.rotation), q)) < 1e-9
    assert np.linalg.norm(anchor.translation - t) < 1e-9


def test_from_pairs_constructor():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(4, q, t)
    anchor = register(list(zip(a, b)))
    assert anchor.residual < 1e-9


# ---------------------------------------------------------------------------
# Planar-rotation oracle: brute-force grid search over the single angle
# ---------------------------------------------------------------------------


def planar_cost(theta, a0, b0):
    c, s = math.cos(theta), math.sin(theta)
    rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return float(np.sum((a0 @ rz.T - b0) ** 2))


def grid_search_angle(a0, b0):
    thetas = np.linspace(-math.pi, math.pi, 3600, endpoint=False)
    costs = [planar_cost(t, a0, b0) for t in thetas]
    best = thetas[int(np.argmin(costs))]
    step = 2 * math.pi / 3600
    fine = np.linspace(best - 2 * step, best + 2 * step, 2001)
    fine_costs = [planar_cost(t, a0, b0) for t in fine]
    return float(fine[int(np.argmin(fine_costs))])


def test_planar_rotation_matches_grid_search():
    for trial in range(5):
        theta_true = float(rng.uniform(-math.pi, math.pi))
        a = np.column_stack([rng.uniform(-0.5, 0.5, (8, 2)), np.zeros(8)])
        q = quat_from_axis_angle([0, 0, 1], theta_true)
        b = np.array([quat_rotate(q, p) for p in a])
        b[:, :2] += rng.normal(scale=1e-3, size=(8, 2))  # in-plane noise only

        a0 = a - a.mean(axis=0)
        b0 = b - b.mean(axis=0)
        theta_oracle = grid_search_angle(a0, b0)

        anchor = register(CorrespondenceSet(a, b))
        r = quat_to_matrix(anchor.rotation)
        assert r[2, 2] > 1.0 - 1e-9  # stays a rotation about z
        theta_solved = math.atan2(r[1, 0], r[0, 0])
        diff = (theta_solved - theta_oracle + math.pi) % (2 * math.pi) - math.pi
        assert abs(diff) < 1e-4


# ---------------------------------------------------------------------------
# Optimality under perturbation
# ---------------------------------------------------------------------------


def fit_cost(rot_q, t, a, b):
    mapped = np.array([quat_rotate(rot_q, p) for p in a]) + t
    return float(np.sum((mapped - b) ** 2))


def test_solution_beats_random_perturbations():
    for _ in range(50):
        q, t = random_quat(), rng.uniform(-1, 1, 3)
        a, b = make_pairs(8, q, t, noise=5e-3)
        anchor = register(CorrespondenceSet(a, b))
        base = fit_cost(anchor.rotation, anchor.translation, a, b)
        for _ in range(10):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            dq = quat_from_axis_angle(axis, float(rng.uniform(1e-4, 0.1)))
            q_pert = quat_multiply(dq, anchor.rotation)
            # give the perturbed rotation its own optimal translation
            rp = quat_to_matrix(q_pert)
            t_pert = b.mean(axis=0) - rp @ a.mean(axis=0)
            assert fit_cost(q_pert, t_pert, a, b) >= base - 1e-12


# ---------------------------------------------------------------------------
# Residual gating
# ---------------------------------------------------------------------------


def test_small_noise_accepted_with_residual():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(10, q, t, noise=1e-4)
    anchor = register(CorrespondenceSet(a, b))
    assert anchor.anchored
    assert 0.0 < anchor.residual < 0.02


def test_large_noise_rejected():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(12, q, t, noise=0.2)
    with pytest.raises(RegistrationError) as exc:
        register(CorrespondenceSet(a, b))
    assert exc.value.residual > 0.02
    assert exc.value.max_residual == 0.02


def test_custom_threshold():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(10, q, t, noise=1e-3)
    anchor = register(CorrespondenceSet(a, b), max_residual=1.0)
    assert anchor.anchored


# ---------------------------------------------------------------------------
# Reflection branch
# ---------------------------------------------------------------------------


def test_mirrored_data_yields_proper_rotation():
    a = rng.uniform(-0.5, 0.5, (10, 3))
    b = a.copy()
    b[:, 2] *= -1.0  # reflection through the xy plane
    anchor = register(CorrespondenceSet(a, b), max_residual=np.inf)
    r = quat_to_matrix(anchor.rotation)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)
    assert anchor.residual > 0.01  # reflection is not reachable, fit is lossy
    # still the best proper rotation available
    base = fit_cost(anchor.rotation, anchor.translation, a, b)
    for _ in range(20):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        dq = quat_from_axis_angle(axis, float(rng.uniform(1e-3, 0.3)))
        q_pert = quat_multiply(dq, anchor.rotation)
        t_pert = b.mean(axis=0) - quat_to_matrix(q_pert) @ a.mean(axis=0)
        assert fit_cost(q_pert, t_pert, a, b) >= base - 1e-12


# ---------------------------------------------------------------------------
# Degenerate input
# ---------------------------------------------------------------------------


def test_collinear_points_rejected():
    direction = np.array([0.3, 0.5, -0.2])
    a = np.outer(np.arange(5, dtype=float), direction)
    b = a + 1.0
    with pytest.raises(DegenerateConfigurationError):
        register(CorrespondenceSet(a, b))


def test_coincident_points_rejected():
    a = np.tile([0.1, 0.2, 0.3], (4, 1))
    with pytest.raises(DegenerateConfigurationError):
        register(CorrespondenceSet(a, a))


def test_too_few_pairs():
    with pytest.raises(ValueError):
        CorrespondenceSet(np.zeros((2, 3)), np.zeros((2, 3)))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        CorrespondenceSet(np.zeros((4, 3)), np.zeros((5, 3)))


def test_nonfinite_points():
    a = rng.uniform(-1, 1, (4, 3))
    b = a.copy()
    b[0, 0] = np.nan
    with pytest.raises(ValueError):
        CorrespondenceSet(a, b)


# ---------------------------------------------------------------------------
# Applying the anchor
# ---------------------------------------------------------------------------


def test_apply_is_isometry():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(5, q, t)
    anchor = register(CorrespondenceSet(a, b))
    pts = rng.uniform(-1, 1, (10, 3))
    mapped = np.array([apply_point(anchor, p) for p in pts])
    for i in range(10):
        for j in range(i):
            d0 = np.linalg.norm(pts[i] - pts[j])
            d1 = np.linalg.norm(mapped[i] - mapped[j])
            assert d1 == pytest.approx(d0, abs=1e-12)


def test_apply_pose_matches_apply_point():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(5, q, t)
    anchor = register(CorrespondenceSet(a, b))
    pose = Pose(rng.uniform(-1, 1, 3), random_quat())
    out = apply(anchor, pose)
    assert np.allclose(out.position, apply_point(anchor, pose.position), atol=1e-15)
    assert np.allclose(out.orientation,
                       quat_multiply(anchor.rotation, pose.orientation), atol=1e-15)


def test_identity_anchor_passthrough():
    anchor = AnchorTransform.identity()
    pose = Pose(rng.uniform(-1, 1, 3), random_quat())
    out = apply(anchor, pose)
    assert np.allclose(out.position, pose.position, atol=1e-15)
    assert np.allclose(out.orientation, pose.orientation, atol=1e-15)


def test_unanchored_apply_raises():
    with pytest.raises(NotAnchoredError):
        apply(AnchorTransform.unanchored(), Pose.identity())
    with pytest.raises(NotAnchoredError):
        apply_point(AnchorTransform.unanchored(), [0, 0, 0])


def test_as_pose_round_trip():
    q, t = random_quat(), rng.uniform(-1, 1, 3)
    a, b = make_pairs(5, q, t)
    anchor = register(CorrespondenceSet(a, b))
    pose = anchor.as_pose()
    p = rng.uniform(-1, 1, 3)
    assert np.allclose(pose.transform_point(p), apply_point(anchor, p), atol=1e-15)
