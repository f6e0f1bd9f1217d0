import math

import numpy as np
import pytest

from ntplan.geometry import (Environment, InvalidEnvironment, NLinkArm, Obstacle,
                             PointRobot, RigidBody, Workspace, forward_kinematics,
                             load_environment, save_environment)


def test_workspace_invariants():
    with pytest.raises(InvalidEnvironment, match="x_min"):
        Workspace(5, 5, 0, 10)
    with pytest.raises(InvalidEnvironment, match="y_min"):
        Workspace(0, 10, 3, 1)


def test_obstacle_invariants():
    with pytest.raises(InvalidEnvironment, match="half_w"):
        Obstacle(0, 0, -1.0, 1.0)
    with pytest.raises(InvalidEnvironment, match="half_h"):
        Obstacle(0, 0, 1.0, 0.0)


def test_obstacle_outside_workspace_rejected():
    with pytest.raises(InvalidEnvironment, match="obstacle 0"):
        Environment(workspace=Workspace(0, 10, 0, 10), robot=PointRobot(),
                    obstacles=(Obstacle(50, 50, 1, 1),))


def test_rigid_body_polygon_validation():
    with pytest.raises(InvalidEnvironment):
        RigidBody(vertices=((0, 0), (1, 0)))
    with pytest.raises(InvalidEnvironment):  # clockwise
        RigidBody(vertices=((0, 0), (0, 1), (1, 1), (1, 0)))
    RigidBody(vertices=((0, 0), (1, 0), (1, 1), (0, 1)))  # ccw ok


# --- configuration-space metric -------------------------------------------

def test_distance_point_3_4_5(empty_env):
    cs = empty_env.cspace()
    assert cs.distance([0, 0], [3, 4]) == 5.0


def test_distance_se2_wrap_shortest_arc(rigid_env):
    cs = rigid_env.cspace()
    d = cs.distance([0, 0, math.pi - 0.1], [0, 0, -math.pi + 0.1])
    assert d == pytest.approx(rigid_env.w_theta * 0.2, abs=1e-12)


def test_distance_joints_identity(arm_env):
    cs = arm_env.cspace()
    assert cs.distance([0.0, 0.0], [0.0, 0.0]) == 0.0


def test_distance_symmetry_and_triangle(empty_env, rigid_env, arm_env, rng):
    for env in (empty_env, rigid_env, arm_env):
        cs = env.cspace()
        for _ in range(200):
            a, b, c = (cs.sample(rng) for _ in range(3))
            assert cs.distance(a, b) == cs.distance(b, a)
            assert cs.distance(a, a) == 0.0
            assert cs.distance(a, c) <= cs.distance(a, b) + cs.distance(b, c) + 1e-12


def test_distance_dimension_mismatch(empty_env):
    with pytest.raises(ValueError, match="shape"):
        empty_env.cspace().distance([0, 0, 0], [1, 1, 1])


# --- interpolation ---------------------------------------------------------

def test_interpolate_midpoint(empty_env):
    cs = empty_env.cspace()
    np.testing.assert_array_equal(cs.interpolate([0, 0], [10, 0], 0.5), [5.0, 0.0])


def test_interpolate_seam_crossing(rigid_env):
    cs = rigid_env.cspace()
    mid = cs.interpolate([0, 0, math.pi - 0.1], [0, 0, -math.pi + 0.1], 0.5)
    # shortest arc crosses the +/- pi seam
    assert abs(mid[2]) == pytest.approx(math.pi, abs=1e-12)


def test_interpolate_endpoints_exact(empty_env, rigid_env, arm_env, rng):
    for env in (empty_env, rigid_env, arm_env):
        cs = env.cspace()
        for _ in range(50):
            a, b = cs.sample(rng), cs.sample(rng)
            np.testing.assert_array_equal(cs.interpolate(a, b, 0.0), a)
            np.testing.assert_array_equal(cs.interpolate(a, b, 1.0), b)


def test_interpolate_joint_endpoint(arm_env):
    cs = arm_env.cspace()
    np.testing.assert_array_equal(cs.interpolate([0.0, 0.0], [math.pi / 2, 0.0], 1.0),
                                  [math.pi / 2, 0.0])


def test_interpolate_monotone_distance_point(empty_env, rng):
    cs = empty_env.cspace()
    for _ in range(50):
        a, b = cs.sample(rng), cs.sample(rng)
        prev = -1.0
        for t in np.linspace(0, 1, 11):
            d = cs.distance(a, cs.interpolate(a, b, float(t)))
            assert d >= prev
            prev = d


def test_interpolate_t_out_of_range(empty_env):
    with pytest.raises(ValueError, match="outside"):
        empty_env.cspace().interpolate([0, 0], [1, 1], 1.5)


# --- forward kinematics -----------------------------------------------------

def test_fk_straight_arm():
    arm = NLinkArm(link_lengths=(1.0, 1.0), base=(0.0, 0.0))
    pts = forward_kinematics([0.0, 0.0], arm)
    np.testing.assert_allclose(pts, [[0, 0], [1, 0], [2, 0]], atol=1e-15)


def test_fk_right_angle():
    arm = NLinkArm(link_lengths=(1.0, 1.0), base=(0.0, 0.0))
    pts = forward_kinematics([math.pi / 2, -math.pi / 2], arm)
    np.testing.assert_allclose(pts, [[0, 0], [0, 1], [1, 1]], atol=1e-12)


def test_fk_segment_lengths_match_links(rng):
    # oracle: each segment's Euclidean length equals its link length
    for _ in range(100):
        n = int(rng.integers(1, 7))
        lengths = rng.uniform(0.2, 2.0, n)
        arm = NLinkArm(link_lengths=tuple(lengths), base=(rng.uniform(-1, 1), rng.uniform(-1, 1)))
        q = rng.uniform(-math.pi, math.pi, n)
        pts = forward_kinematics(q, arm)
        seg = np.diff(pts, axis=0)
        np.testing.assert_allclose(np.hypot(seg[:, 0], seg[:, 1]), lengths, atol=1e-9)


def test_fk_dimension_mismatch():
    arm = NLinkArm(link_lengths=(1.0, 1.0))
    with pytest.raises(ValueError, match="shape"):
        forward_kinematics([0.0], arm)


# --- environment files ------------------------------------------------------

def test_env_file_roundtrip(tmp_path, wall_env):
    env4 = Environment(
        workspace=Workspace(0, 20, 0, 20), robot=PointRobot(), name="four",
        obstacles=tuple(Obstacle(4 + 3 * i, 5 + 2 * i, 1.0 + 0.1 * i, 0.5) for i in range(4)))
    for env in (wall_env, env4):
        path = tmp_path / f"{env.name}.env"
        save_environment(env, path)
        loaded = load_environment(path)
        assert loaded == env


def test_env_file_roundtrip_all_robots(tmp_path, rigid_env, arm_env):
    for env in (rigid_env, arm_env):
        path = tmp_path / "e.env"
        save_environment(env, path)
        assert load_environment(path) == env


def test_load_empty_obstacles(tmp_path):
    path = tmp_path / "empty.env"
    path.write_text(
        "name: empty\n"
        "workspace: {x_min: 0, x_max: 20, y_min: 0, y_max: 20}\n"
        "robot: {kind: point}\n")
    env = load_environment(path)
    assert env.obstacles == ()
    assert env.workspace.x_max == 20


def test_load_invalid_half_width(tmp_path):
    path = tmp_path / "bad.env"
    path.write_text(
        "name: bad\n"
        "workspace: {x_min: 0, x_max: 20, y_min: 0, y_max: 20}\n"
        "robot: {kind: point}\n"
        "obstacles: [{cx: 5, cy: 5, half_w: -1, half_h: 1}]\n")
    with pytest.raises(InvalidEnvironment, match="half_w"):
        load_environment(path)


def test_load_unparseable_file(tmp_path):
    path = tmp_path / "garbage.env"
    path.write_text("workspace: [unbalanced\n  ]: {")
    with pytest.raises(InvalidEnvironment, match="parse"):
        load_environment(path)


def test_load_no_free_space(tmp_path):
    path = tmp_path / "solid.env"
    path.write_text(
        "name: solid\n"
        "workspace: {x_min: 0, x_max: 10, y_min: 0, y_max: 10}\n"
        "robot: {kind: point}\n"
        "obstacles: [{cx: 5, cy: 5, half_w: 6, half_h: 6}]\n")
    with pytest.raises(InvalidEnvironment, match="free space"):
        load_environment(path)
