"""Bundled example environments.

Layouts are hand-tuned so every task family spans an easy-to-hard
difficulty range (non-triviality roughly 0.2 to 0.7 under the family's
data-generation padding).  `wall` is the canonical demo world used
throughout the docs: a vertical wall with a gap along the top.
"""

import numpy as np

from .geometry import Environment, NLinkArm, Obstacle, PointRobot, RigidBody, Workspace

# obstacle padding applied while generating data, per task family
FAMILY_PADDING = {"point": 0.8, "rigid": 0.4, "arm": 0.15}

_RIGID_ROBOT = RigidBody(vertices=((0.4, -0.25), (0.4, 0.25), (-0.4, 0.25), (-0.4, -0.25)))
_W20 = Workspace(0, 20, 0, 20)
_W10 = Workspace(0, 10, 0, 10)


def _point(name, *obstacles):
    return Environment(workspace=_W20, robot=PointRobot(), obstacles=obstacles, name=name)


def _rigid(name, *obstacles):
    return Environment(workspace=_W10, robot=_RIGID_ROBOT, obstacles=obstacles, name=name)


def bundled_environments():
    """All bundled environments, keyed by name."""
    envs = [
        # demo world: wall x in [9, 11], y in [0, 15], passable above
        _point("wall", Obstacle(10.0, 7.5, 1.0, 7.5)),

        # point-robot family, nontriviality ~0.28 / 0.37 / 0.60 / 0.67 at padding 0.8
        _point("point_0", Obstacle(8.0, 8.0, 1.8, 1.8)),
        _point("point_1", Obstacle(10.0, 6.0, 1.0, 6.0)),
        _point("point_2", Obstacle(7.0, 13.5, 1.0, 6.5), Obstacle(13.0, 6.5, 1.0, 6.5)),
        _point("point_3", Obstacle(5.0, 5.0, 1.2, 4.0), Obstacle(10.0, 14.0, 1.2, 5.0),
               Obstacle(15.0, 6.0, 1.2, 4.0), Obstacle(10.0, 2.5, 4.0, 1.0)),

        # rigid-body family, nontriviality ~0.67 / 0.64 / 0.46 / 0.74 at padding 0.4;
        # every padded passage stays > 1.3 units wide so the expert never stalls
        _rigid("rigid_0", Obstacle(5.0, 4.0, 0.5, 4.0), Obstacle(1.8, 7.0, 0.6, 0.5),
               Obstacle(8.3, 7.0, 0.5, 0.6)),
        _rigid("rigid_1", Obstacle(3.5, 6.75, 0.5, 3.25), Obstacle(6.5, 3.25, 0.5, 3.25)),
        _rigid("rigid_2", Obstacle(3.0, 3.0, 0.8, 0.8), Obstacle(7.0, 7.0, 0.8, 0.8)),
        _rigid("rigid_3", Obstacle(5.0, 5.0, 0.6, 3.2), Obstacle(5.0, 5.0, 3.2, 0.6)),

        # articulated-arm family, nontriviality ~0.21 / 0.52 / 0.33 / 0.39
        Environment(workspace=Workspace(-2, 2, -2, 2),
                    robot=NLinkArm(link_lengths=(1.0, 0.8)),
                    obstacles=(Obstacle(1.2, 1.2, 0.35, 0.35),), name="arm_2"),
        Environment(workspace=Workspace(-2, 2, -2, 2),
                    robot=NLinkArm(link_lengths=(1.0, 0.8)),
                    obstacles=(Obstacle(1.2, 1.2, 0.35, 0.35),
                               Obstacle(-1.2, -0.9, 0.35, 0.35)), name="arm_2b"),
        Environment(workspace=Workspace(-3, 3, -3, 3),
                    robot=NLinkArm(link_lengths=(0.9, 0.7, 0.6, 0.5)),
                    obstacles=(Obstacle(1.5, 1.5, 0.4, 0.4),
                               Obstacle(-1.4, -1.0, 0.4, 0.4)), name="arm_4"),
        Environment(workspace=Workspace(-4, 4, -4, 4),
                    robot=NLinkArm(link_lengths=(0.8, 0.7, 0.6, 0.5, 0.5, 0.4)),
                    obstacles=(Obstacle(1.8, 1.8, 0.5, 0.5), Obstacle(-1.8, 1.2, 0.45, 0.45),
                               Obstacle(0.5, -2.0, 0.5, 0.5)), name="arm_6"),
    ]
    return {env.name: env for env in envs}


def bundled(name: str) -> Environment:
    envs = bundled_environments()
    if name not in envs:
        raise KeyError(f"unknown bundled environment {name!r}; "
                       f"choices: {', '.join(sorted(envs))}")
    return envs[name]


def family_of(env: Environment) -> str:
    if isinstance(env.robot, PointRobot):
        return "point"
    if isinstance(env.robot, RigidBody):
        return "rigid"
    return "arm"


def default_padding(env: Environment) -> float:
    return FAMILY_PADDING[family_of(env)]


# trivial demo query in rigid_0's open lower-right region: straight-line
# solvable, so a model trained purely on pruned non-trivial segments has
# never seen anything like it
SHOWCASE_TRIVIAL_QUERY = {
    "rigid_0": (np.array([6.5, 1.5, 0.0]), np.array([9.0, 2.5, 0.0])),
}
