"""Configuration validity checks against an obstacle-inflated environment."""

import numpy as np

from . import _kernels
from .geometry import Environment, NLinkArm, Obstacle, forward_kinematics

__all__ = ["InflatedView", "is_valid", "segment_hits_obstacle", "forward_kinematics"]


class InflatedView:
    """An environment with every obstacle grown by a fixed padding.

    Padding is applied to the obstacle half extents only; the workspace
    box is never shrunk.  A view with padding 0 behaves exactly like the
    base environment.  Instances are immutable and safe to share.
    """

    def __init__(self, env: Environment, padding: float = 0.0):
        if padding < 0:
            raise ValueError(f"padding must be >= 0, got {padding}")
        self.env = env
        self.padding = float(padding)
        self.cspace = env.cspace()
        if env.obstacles:
            self.rects = np.ascontiguousarray(
                np.stack([obs.aabb(self.padding) for obs in env.obstacles]))
        else:
            self.rects = np.zeros((0, 4), dtype=np.float64)
        self.bounds = self.cspace.bounds

    def _free_args(self):
        cs = self.cspace
        return (cs.kind, cs.verts, cs.lengths, cs.base, cs.contained,
                self.rects, self.bounds)

    def is_valid(self, q) -> bool:
        """True iff the robot at q touches no inflated obstacle and stays in bounds."""
        q = self.cspace.check(q)
        return bool(_kernels.config_free(q, *self._free_args()))

    def is_valid_many(self, qs) -> np.ndarray:
        qs = np.ascontiguousarray(qs, dtype=np.float64)
        if qs.ndim != 2 or qs.shape[1] != self.cspace.dim:
            raise ValueError(f"configuration batch shape {qs.shape} does not match "
                             f"dimension {self.cspace.dim}")
        return _kernels.configs_free(qs, *self._free_args()).astype(bool)

    def steer(self, a, b, resolution: float | None = None) -> bool:
        """Collision-free straight-line connection test between a and b."""
        cs = self.cspace
        a = cs.check(a)
        b = cs.check(b)
        if resolution is None:
            resolution = cs.default_resolution
        if resolution <= 0:
            raise ValueError(f"resolution must be > 0, got {resolution}")
        return bool(_kernels.steer(a, b, cs.kind, cs.verts, cs.lengths, cs.base,
                                   cs.contained, cs.w_theta, self.rects,
                                   self.bounds, float(resolution)))


def is_valid(q, view: InflatedView) -> bool:
    return view.is_valid(q)


def segment_hits_obstacle(p, q, obs: Obstacle, padding: float = 0.0) -> bool:
    """Exact segment vs inflated-rectangle overlap; boundary contact hits."""
    rect = obs.aabb(padding)
    return bool(_kernels.segment_hits_rect(float(p[0]), float(p[1]),
                                           float(q[0]), float(q[1]), rect))
