"""Local steering predicate, path cost and path feasibility.

Paths are (L, d) float64 arrays of waypoints; every consecutive pair
implies a straight-line steering segment in configuration space.
"""

import numpy as np

from .collision import InflatedView


def as_path(waypoints, dim: int) -> np.ndarray:
    path = np.ascontiguousarray(waypoints, dtype=np.float64)
    if path.ndim != 2 or path.shape[1] != dim or path.shape[0] < 1:
        raise ValueError(f"path shape {path.shape} invalid for dimension {dim}")
    return path


def steer_to(a, b, view: InflatedView, resolution: float | None = None) -> bool:
    """True iff the discretized straight-line motion from a to b is collision free.

    Samples are spaced at most `resolution` apart (configuration-space
    metric), endpoints included; invalid endpoints simply yield False.
    """
    return view.steer(a, b, resolution)


def path_cost(path, view_or_cspace) -> float:
    """Sum of configuration-space distances over consecutive waypoints."""
    cs = view_or_cspace.cspace if isinstance(view_or_cspace, InflatedView) else view_or_cspace
    path = as_path(path, cs.dim)
    total = 0.0
    for i in range(path.shape[0] - 1):
        total += cs.distance(path[i], path[i + 1])
    return total


def path_feasible(path, view: InflatedView, resolution: float | None = None) -> bool:
    """True iff steering succeeds along every consecutive waypoint pair."""
    path = as_path(path, view.cspace.dim)
    if path.shape[0] < 2:
        raise ValueError("path feasibility needs at least two waypoints")
    for i in range(path.shape[0] - 1):
        if not view.steer(path[i], path[i + 1], resolution):
            return False
    return True
