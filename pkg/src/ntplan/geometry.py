"""Workspaces, obstacles, robot models and environment files.

Configurations are plain float64 numpy vectors; the environment's robot
model fixes their meaning: [x, y] for a point robot, [x, y, theta] for a
rigid body, one joint angle per link for an arm.  Angles live in
(-pi, pi].
"""

import math
from dataclasses import dataclass

import numpy as np
import yaml

from . import _kernels
from ._kernels import KIND_ARM, KIND_POINT, KIND_RIGID, wrap_angle, wrap_angles


class InvalidEnvironment(ValueError):
    """Malformed or invalid environment description."""


@dataclass(frozen=True)
class Workspace:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise InvalidEnvironment(f"workspace x_min {self.x_min} must be < x_max {self.x_max}")
        if not self.y_min < self.y_max:
            raise InvalidEnvironment(f"workspace y_min {self.y_min} must be < y_max {self.y_max}")

    def bounds(self) -> np.ndarray:
        return np.array([self.x_min, self.y_min, self.x_max, self.y_max], dtype=np.float64)


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned rectangular block, stored as center + half extents."""

    cx: float
    cy: float
    half_w: float
    half_h: float

    def __post_init__(self):
        if self.half_w <= 0:
            raise InvalidEnvironment(f"obstacle half_w must be > 0, got {self.half_w}")
        if self.half_h <= 0:
            raise InvalidEnvironment(f"obstacle half_h must be > 0, got {self.half_h}")

    def aabb(self, padding: float = 0.0) -> np.ndarray:
        """[x_min, y_min, x_max, y_max] after growing by `padding`."""
        return np.array([
            self.cx - self.half_w - padding,
            self.cy - self.half_h - padding,
            self.cx + self.half_w + padding,
            self.cy + self.half_h + padding,
        ], dtype=np.float64)


@dataclass(frozen=True)
class PointRobot:
    kind = "point"


@dataclass(frozen=True)
class RigidBody:
    """Convex polygon robot, vertices counterclockwise in the body frame."""

    vertices: tuple  # of (x, y) pairs

    kind = "rigid"

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise InvalidEnvironment("rigid body needs >= 3 planar vertices")
        # counterclockwise and convex: every cross product positive
        n = verts.shape[0]
        for i in range(n):
            a = verts[i]
            b = verts[(i + 1) % n]
            c = verts[(i + 2) % n]
            cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if cross <= 0:
                raise InvalidEnvironment("rigid body polygon must be convex and counterclockwise")
        object.__setattr__(self, "vertices", tuple(map(tuple, verts.tolist())))

    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=np.float64)


@dataclass(frozen=True)
class NLinkArm:
    """Planar articulated arm; joint angles accumulate along the chain."""

    link_lengths: tuple
    base: tuple = (0.0, 0.0)
    contained: bool = True  # require every joint to stay inside the workspace

    kind = "arm"

    def __post_init__(self):
        lengths = tuple(float(v) for v in self.link_lengths)
        if len(lengths) < 1 or any(v <= 0 for v in lengths):
            raise InvalidEnvironment("arm link lengths must be positive")
        object.__setattr__(self, "link_lengths", lengths)
        object.__setattr__(self, "base", (float(self.base[0]), float(self.base[1])))

    @property
    def n(self) -> int:
        return len(self.link_lengths)


@dataclass(frozen=True)
class Environment:
    workspace: Workspace
    robot: object
    obstacles: tuple = ()
    name: str = "unnamed"
    w_theta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        ws = self.workspace
        for i, obs in enumerate(self.obstacles):
            box = obs.aabb()
            if box[2] < ws.x_min or box[0] > ws.x_max or box[3] < ws.y_min or box[1] > ws.y_max:
                raise InvalidEnvironment(f"obstacle {i} lies entirely outside the workspace")
        if self.w_theta <= 0:
            raise InvalidEnvironment(f"w_theta must be > 0, got {self.w_theta}")

    def cspace(self) -> "CSpace":
        return CSpace(self)


class CSpace:
    """Configuration-space semantics derived from an environment's robot."""

    def __init__(self, env: Environment):
        self.env = env
        robot = env.robot
        if isinstance(robot, PointRobot):
            self.kind = KIND_POINT
            self.dim = 2
            self.verts = np.zeros((0, 2), dtype=np.float64)
            self.lengths = np.zeros(0, dtype=np.float64)
            self.base = np.zeros(2, dtype=np.float64)
            self.contained = 1
        elif isinstance(robot, RigidBody):
            self.kind = KIND_RIGID
            self.dim = 3
            self.verts = robot.vertex_array()
            self.lengths = np.zeros(0, dtype=np.float64)
            self.base = np.zeros(2, dtype=np.float64)
            self.contained = 1
        elif isinstance(robot, NLinkArm):
            self.kind = KIND_ARM
            self.dim = robot.n
            self.verts = np.zeros((0, 2), dtype=np.float64)
            self.lengths = np.asarray(robot.link_lengths, dtype=np.float64)
            self.base = np.asarray(robot.base, dtype=np.float64)
            self.contained = 1 if robot.contained else 0
        else:
            raise InvalidEnvironment(f"unknown robot model {robot!r}")
        self.w_theta = float(env.w_theta)
        self.bounds = env.workspace.bounds()

    # default steering discretization, recorded in dataset metadata
    @property
    def default_resolution(self) -> float:
        return 0.02 if self.kind == KIND_ARM else 0.05

    def check(self, q) -> np.ndarray:
        q = np.ascontiguousarray(q, dtype=np.float64)
        if q.shape != (self.dim,):
            raise ValueError(f"configuration shape {q.shape} does not match dimension {self.dim}")
        return q

    def wrap(self, q) -> np.ndarray:
        """Canonicalize angular components to (-pi, pi]."""
        q = self.check(q)
        if self.kind == KIND_RIGID:
            q = q.copy()
            q[2] = wrap_angle(q[2])
        elif self.kind == KIND_ARM:
            q = wrap_angles(q)
        return q

    def distance(self, a, b) -> float:
        a = self.check(a)
        b = self.check(b)
        return float(_kernels.config_distance(a, b, self.kind, self.w_theta))

    def interpolate(self, a, b, t: float) -> np.ndarray:
        """Configuration at parameter t in [0, 1]; angles take the shortest arc."""
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"interpolation parameter {t} outside [0, 1]")
        a = self.check(a)
        b = self.check(b)
        if t == 0.0:
            return a.copy()
        if t == 1.0:
            return b.copy()
        if self.kind == KIND_ARM:
            return wrap_angles(a + t * wrap_angles(b - a))
        out = a + t * (b - a)
        if self.kind == KIND_RIGID:
            out[2] = wrap_angle(a[2] + t * wrap_angle(b[2] - a[2]))
        return out

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw over the configuration-space box (not validity-checked)."""
        if self.kind == KIND_ARM:
            return wrap_angles(-math.pi + rng.random(self.dim) * 2.0 * math.pi)
        b = self.bounds
        q = np.empty(self.dim, dtype=np.float64)
        q[0] = b[0] + rng.random() * (b[2] - b[0])
        q[1] = b[1] + rng.random() * (b[3] - b[1])
        if self.kind == KIND_RIGID:
            q[2] = wrap_angle(-math.pi + rng.random() * 2.0 * math.pi)
        return q


def forward_kinematics(q, arm: NLinkArm) -> np.ndarray:
    """Arm joint positions (n+1 points, base first)."""
    q = np.ascontiguousarray(q, dtype=np.float64)
    if q.shape != (arm.n,):
        raise ValueError(f"joint vector shape {q.shape} does not match {arm.n} links")
    return _kernels.fk_points(q, np.asarray(arm.link_lengths, dtype=np.float64),
                              np.asarray(arm.base, dtype=np.float64))


# ---------------------------------------------------------------------------
# environment files (YAML)
# ---------------------------------------------------------------------------

def _robot_to_dict(robot) -> dict:
    if isinstance(robot, PointRobot):
        return {"kind": "point"}
    if isinstance(robot, RigidBody):
        return {"kind": "rigid", "vertices": [list(v) for v in robot.vertices]}
    if isinstance(robot, NLinkArm):
        return {"kind": "arm", "link_lengths": list(robot.link_lengths),
                "base": list(robot.base), "contained": bool(robot.contained)}
    raise InvalidEnvironment(f"unknown robot model {robot!r}")


def _robot_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "point":
        return PointRobot()
    if kind == "rigid":
        if "vertices" not in d:
            raise InvalidEnvironment("rigid robot needs a 'vertices' field")
        return RigidBody(vertices=tuple(map(tuple, d["vertices"])))
    if kind == "arm":
        if "link_lengths" not in d:
            raise InvalidEnvironment("arm robot needs a 'link_lengths' field")
        return NLinkArm(link_lengths=tuple(d["link_lengths"]),
                        base=tuple(d.get("base", (0.0, 0.0))),
                        contained=bool(d.get("contained", True)))
    raise InvalidEnvironment(f"unknown robot kind {kind!r}")


def environment_to_dict(env: Environment) -> dict:
    ws = env.workspace
    return {
        "name": env.name,
        "workspace": {"x_min": ws.x_min, "x_max": ws.x_max,
                      "y_min": ws.y_min, "y_max": ws.y_max},
        "robot": _robot_to_dict(env.robot),
        "obstacles": [{"cx": o.cx, "cy": o.cy, "half_w": o.half_w, "half_h": o.half_h}
                      for o in env.obstacles],
        "w_theta": env.w_theta,
    }


def environment_from_dict(d: dict) -> Environment:
    try:
        ws_d = d["workspace"]
        ws = Workspace(float(ws_d["x_min"]), float(ws_d["x_max"]),
                       float(ws_d["y_min"]), float(ws_d["y_max"]))
        robot = _robot_from_dict(d.get("robot", {"kind": "point"}))
        obstacles = tuple(Obstacle(float(o["cx"]), float(o["cy"]),
                                   float(o["half_w"]), float(o["half_h"]))
                          for o in d.get("obstacles", []))
    except KeyError as exc:
        raise InvalidEnvironment(f"missing environment field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidEnvironment):
            raise
        raise InvalidEnvironment(f"malformed environment field: {exc}") from None
    env = Environment(workspace=ws, robot=robot, obstacles=obstacles,
                      name=str(d.get("name", "unnamed")),
                      w_theta=float(d.get("w_theta", 1.0)))
    _check_free_space(env)
    return env


def _check_free_space(env: Environment, attempts: int = 4096):
    """Reject environments whose free space cannot be sampled at all."""
    from .collision import InflatedView  # local import to avoid a cycle

    cs = env.cspace()
    view = InflatedView(env, 0.0)
    rng = np.random.default_rng(0)
    for _ in range(attempts):
        if view.is_valid(cs.sample(rng)):
            return
    raise InvalidEnvironment(f"environment '{env.name}' has no sampleable free space")


def save_environment(env: Environment, path):
    with open(path, "w") as fh:
        yaml.safe_dump(environment_to_dict(env), fh, sort_keys=False)


def load_environment(path) -> Environment:
    try:
        with open(path) as fh:
            d = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise InvalidEnvironment(f"cannot parse environment file {path}: {exc}") from None
    if not isinstance(d, dict):
        raise InvalidEnvironment(f"environment file {path} does not hold a mapping")
    return environment_from_dict(d)
