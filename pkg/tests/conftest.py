import numpy as np
import pytest

from ntplan.collision import InflatedView
from ntplan.geometry import (Environment, NLinkArm, Obstacle, PointRobot,
                             RigidBody, Workspace)


@pytest.fixture
def empty_env():
    return Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                       obstacles=(), name="empty")


@pytest.fixture
def wall_env():
    # vertical wall occupying x in [9, 11], y in [0, 15]; gap above y = 15
    return Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                       obstacles=(Obstacle(10.0, 7.5, 1.0, 7.5),), name="wall")


@pytest.fixture
def box_env():
    # single block centered at (7.5, 7.5), half extents 2.5
    return Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                       obstacles=(Obstacle(7.5, 7.5, 2.5, 2.5),), name="box")


@pytest.fixture
def rigid_env():
    robot = RigidBody(vertices=((0.4, -0.25), (0.4, 0.25), (-0.4, 0.25), (-0.4, -0.25)))
    return Environment(workspace=Workspace(0, 10, 0, 10), robot=robot,
                       obstacles=(Obstacle(5.0, 3.5, 0.6, 3.5),), name="rigid-wall")


@pytest.fixture
def arm_env():
    robot = NLinkArm(link_lengths=(1.0, 0.8), base=(0.0, 0.0))
    return Environment(workspace=Workspace(-2, 2, -2, 2), robot=robot,
                       obstacles=(Obstacle(1.2, 1.2, 0.3, 0.3),), name="arm-2")


@pytest.fixture
def wall_view(wall_env):
    return InflatedView(wall_env, 0.0)


def random_valid_config(view, rng, max_tries=10000):
    cs = view.cspace
    for _ in range(max_tries):
        q = cs.sample(rng)
        if view.is_valid(q):
            return q
    raise RuntimeError("could not sample a valid configuration")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    import re

    seen = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid:
                if status != "passed" or nodeid not in seen:
                    seen[nodeid] = status
    if not seen:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(seen, key=lambda n: (int(re.search(r"criterion_(\d+)", n).group(1)), n)):
        name = nodeid.split("::")[-1]
        m = re.match(r"test_criterion_(\d+)_(.*)", name)
        label = f"criterion {m.group(1)}: {m.group(2).replace('_', ' ')}"
        mark = "PASS" if seen[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {label}")
