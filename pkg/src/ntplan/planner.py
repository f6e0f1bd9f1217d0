"""Greedy steer-or-predict rollout planner with neural replanning.

The planner repeatedly tries a straight connection from the path tip to
the goal and falls back to the learned next-state model when steering
fails.  An ablation mode (use_steer=False) runs the model rollout alone
and terminates on proximity to the goal instead; it never replans.
"""

import time
from dataclasses import dataclass

import numpy as np

from .collision import InflatedView
from .geometry import Environment
from .steering import path_cost, path_feasible

FAIL_NO_GOAL = "no_goal_reached"
FAIL_INFEASIBLE = "infeasible_after_replan"
FAIL_INFEASIBLE_NO_REPLAN = "infeasible_no_replan"


@dataclass(frozen=True)
class PlannerConfig:
    n_plan: int = 80                 # rollout iteration budget
    resolution: float | None = None
    use_steer: bool = True
    delta: float = 1.0               # goal proximity tolerance, steer-free mode
    replan_depth: int = 2            # repair passes over an infeasible path
    replan_segment_cap: int = 20     # rollout budget per broken segment

    def __post_init__(self):
        if self.n_plan < 1:
            raise ValueError(f"n_plan must be >= 1, got {self.n_plan}")
        if not self.use_steer and self.delta <= 0:
            raise ValueError("delta must be > 0 when steering is disabled")
        if self.replan_depth < 0 or self.replan_segment_cap < 1:
            raise ValueError("replan budgets must be non-negative / positive")


@dataclass
class PlanResult:
    success: bool
    path: np.ndarray | None
    failure: str | None
    cost: float
    iterations: int
    replan_invocations: int
    wall_time: float


def _as_view(env) -> InflatedView:
    if isinstance(env, InflatedView):
        return env
    if isinstance(env, Environment):
        return InflatedView(env, 0.0)
    raise TypeError(f"expected Environment or InflatedView, got {type(env)!r}")


def _rollout(start, target, view, model, budget, resolution):
    """Greedy rollout from start toward target; None when never connected."""
    seg = [np.asarray(start, dtype=np.float64)]
    for _ in range(budget):
        if view.steer(seg[-1], target, resolution):
            seg.append(np.asarray(target, dtype=np.float64))
            return seg
        seg.append(model.predict_next(seg[-1], target))
    return None


def replan(path, env, model, cfg: PlannerConfig):
    """Repair an infeasible coarse path with bounded neural rollouts.

    Keeps the valid waypoints, re-rolls every broken gap toward its next
    kept waypoint, and recurses on the stitched path up to
    cfg.replan_depth passes.  Returns (repaired path or None, passes used).
    """
    view = _as_view(env)
    cs = view.cspace
    resolution = cfg.resolution or cs.default_resolution
    current = [np.asarray(w, dtype=np.float64) for w in np.atleast_2d(path)]
    for depth in range(cfg.replan_depth):
        kept = [w for w in current if view.is_valid(w)]
        if len(kept) < 2:
            return None, depth + 1
        out = [kept[0]]
        for u, v in zip(kept, kept[1:]):
            if view.steer(u, v, resolution):
                out.append(v)
                continue
            seg = _rollout(u, v, view, model, cfg.replan_segment_cap, resolution)
            if seg is None:
                return None, depth + 1
            out.extend(seg[1:])
        if path_feasible(np.stack(out), view, resolution):
            return np.stack(out), depth + 1
        current = out
    return None, cfg.replan_depth


def plan(query, env, model, cfg: PlannerConfig) -> PlanResult:
    """Solve one query with the learned model.

    With steering: try the straight goal connection first each iteration,
    otherwise append a model prediction; an infeasible rollout goes to
    replan().  Without steering: predictions only, success on reaching the
    delta ball around the goal, no replanning.
    """
    t0 = time.perf_counter()
    view = _as_view(env)
    cs = view.cspace
    resolution = cfg.resolution or cs.default_resolution
    start = cs.check(query[0])
    goal = cs.check(query[1])
    if not view.is_valid(start):
        raise ValueError("query start configuration is invalid")
    if not view.is_valid(goal):
        raise ValueError("query goal configuration is invalid")

    path = [start]
    reached = False
    iterations = 0
    for _ in range(cfg.n_plan):
        iterations += 1
        tip = path[-1]
        if cfg.use_steer:
            if view.steer(tip, goal, resolution):
                path.append(goal)
                reached = True
                break
        else:
            if cs.distance(tip, goal) <= cfg.delta:
                path.append(goal)
                reached = True
                break
        path.append(model.predict_next(tip, goal))

    def done(success, pth, failure, replans):
        cost = path_cost(pth, cs) if success else float("nan")
        return PlanResult(success=success, path=pth if success else None,
                          failure=failure, cost=cost, iterations=iterations,
                          replan_invocations=replans,
                          wall_time=time.perf_counter() - t0)

    if not reached:
        return done(False, None, FAIL_NO_GOAL, 0)
    rolled = np.stack(path)
    if path_feasible(rolled, view, resolution):
        return done(True, rolled, None, 0)
    if not cfg.use_steer:
        return done(False, None, FAIL_INFEASIBLE_NO_REPLAN, 0)
    repaired, passes = replan(rolled, view, model, cfg)
    if repaired is None:
        return done(False, None, FAIL_INFEASIBLE, passes)
    return done(True, repaired, None, passes)
