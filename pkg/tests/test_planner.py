import numpy as np
import pytest

from ntplan.collision import InflatedView
from ntplan.expert import ExpertConfig, solve_query
from ntplan.mlp import Codec, init_model
from ntplan.planner import (FAIL_INFEASIBLE, FAIL_INFEASIBLE_NO_REPLAN,
                            FAIL_NO_GOAL, PlannerConfig, plan, replan)
from ntplan.steering import path_cost, path_feasible


class LookupModel:
    """Oracle predictor: replays stored expert paths waypoint by waypoint."""

    def __init__(self, paths):
        self.table = {}
        for path in paths:
            for i in range(path.shape[0] - 1):
                self.table[path[i].tobytes()] = path[i + 1]

    def predict_next(self, current, goal):
        key = np.asarray(current, dtype=np.float64).tobytes()
        if key in self.table:
            return self.table[key].copy()
        # unknown state: stall in place (never reaches anything new)
        return np.asarray(current, dtype=np.float64).copy()


class StallModel:
    """Predicts the current state forever (a model that learned nothing)."""

    def predict_next(self, current, goal):
        return np.asarray(current, dtype=np.float64).copy()


def test_trivial_query_succeeds_with_any_model(wall_env, rng):
    cfg = PlannerConfig()
    model = StallModel()
    view = InflatedView(wall_env, 0.0)
    cs = view.cspace
    solved = 0
    for _ in range(100):
        a = np.array([rng.uniform(0, 8.9), rng.uniform(0, 20)])
        b = np.array([rng.uniform(0, 8.9), rng.uniform(0, 20)])
        if not view.is_valid(a) or not view.is_valid(b) or not view.steer(a, b):
            continue
        res = plan((a, b), wall_env, model, cfg)
        assert res.success
        assert res.iterations == 1
        assert res.cost == pytest.approx(cs.distance(a, b), abs=1e-12)
        solved += 1
    assert solved > 50


def test_failure_when_model_never_reaches(wall_env):
    res = plan((np.array([2.0, 2.0]), np.array([18.0, 2.0])), wall_env,
               StallModel(), PlannerConfig(n_plan=25))
    assert not res.success
    assert res.failure == FAIL_NO_GOAL
    assert res.iterations == 25
    assert res.path is None
    assert np.isnan(res.cost)


def test_oracle_model_reproduces_expert_path(wall_env):
    view = InflatedView(wall_env, 0.0)
    start = np.array([2.0, 2.0])
    goal = np.array([18.0, 2.0])
    expert_path = solve_query((start, goal), view,
                              ExpertConfig(cell_size=0.25, smooth_rounds=200, seed=8))
    assert expert_path is not None
    model = LookupModel([expert_path])
    res = plan((start, goal), wall_env, model, PlannerConfig())
    assert res.success
    # greedy goal connections can only skip trailing waypoints, never add new ones
    assert res.path.shape[0] <= expert_path.shape[0]
    for w in res.path[:-1]:
        assert any(np.array_equal(w, e) for e in expert_path)
    np.testing.assert_array_equal(res.path[0], start)
    np.testing.assert_array_equal(res.path[-1], goal)
    assert res.cost <= path_cost(expert_path, view.cspace) + 1e-9


def test_invalid_query_is_input_error(wall_env):
    with pytest.raises(ValueError, match="start"):
        plan((np.array([10.0, 7.0]), np.array([2.0, 2.0])), wall_env,
             StallModel(), PlannerConfig())


# --- replanning -------------------------------------------------------------

def test_replan_identity_on_feasible_path(wall_env):
    view = InflatedView(wall_env, 0.0)
    path = np.array([[2.0, 2.0], [2.0, 18.0], [18.0, 18.0]])
    assert path_feasible(path, view)
    out, passes = replan(path, wall_env, StallModel(), PlannerConfig())
    np.testing.assert_array_equal(out, path)
    assert passes == 1


def test_replan_repairs_with_oracle(wall_env):
    view = InflatedView(wall_env, 0.0)
    start = np.array([2.0, 2.0])
    goal = np.array([18.0, 2.0])
    expert_path = solve_query((start, goal), view,
                              ExpertConfig(cell_size=0.25, smooth_rounds=200, seed=8))
    model = LookupModel([expert_path])
    broken = np.array([start, [10.0, 7.0], goal])  # middle waypoint inside the wall
    assert not view.is_valid(broken[1])
    out, _ = replan(broken, wall_env, model,
                    PlannerConfig(replan_depth=2, replan_segment_cap=30))
    assert out is not None
    assert path_feasible(out, view)
    np.testing.assert_array_equal(out[0], start)
    np.testing.assert_array_equal(out[-1], goal)


def test_replan_depth_zero_fails(wall_env):
    broken = np.array([[2.0, 2.0], [10.0, 7.0], [18.0, 2.0]])
    out, _ = replan(broken, wall_env, StallModel(), PlannerConfig(replan_depth=0))
    assert out is None
    res = plan((np.array([2.0, 2.0]), np.array([18.0, 2.0])), wall_env,
               LookupBridge(), PlannerConfig(replan_depth=0, n_plan=5))
    assert not res.success


class LookupBridge:
    """Always predicts a point past the wall: the rollout reaches the goal
    but its first segment cuts straight through the obstacle."""

    def predict_next(self, current, goal):
        return np.array([12.0, 2.0])


def test_infeasible_after_replan_reported(wall_env):
    res = plan((np.array([2.0, 2.0]), np.array([18.0, 2.0])), wall_env,
               LookupBridge(), PlannerConfig(n_plan=10, replan_depth=1,
                                             replan_segment_cap=3))
    assert not res.success
    assert res.failure == FAIL_INFEASIBLE
    assert res.replan_invocations >= 1


# --- steer-free ablation ------------------------------------------------------

def test_no_steer_success_within_delta(empty_env):
    class Stepper:
        def predict_next(self, current, goal):
            v = goal - current
            n = np.linalg.norm(v)
            return current + (0.9 * v / n if n > 1e-9 else v)

    cfg = PlannerConfig(use_steer=False, delta=1.0, n_plan=80)
    res = plan((np.array([2.0, 2.0]), np.array([10.0, 2.0])), empty_env, Stepper(), cfg)
    assert res.success
    np.testing.assert_array_equal(res.path[-1], [10.0, 2.0])
    # rollout stops predicting once inside the delta ball
    assert res.iterations <= 12


def test_no_steer_never_replans(wall_env):
    cfg = PlannerConfig(use_steer=False, delta=1.0, n_plan=10)

    class JumpAcross:
        def predict_next(self, current, goal):
            return np.asarray(goal, dtype=np.float64) + np.array([0.5, 0.0])

    res = plan((np.array([2.0, 2.0]), np.array([18.0, 2.0])), wall_env,
               JumpAcross(), cfg)
    assert not res.success
    assert res.failure == FAIL_INFEASIBLE_NO_REPLAN
    assert res.replan_invocations == 0


def test_no_steer_trivial_start_inside_delta(empty_env):
    cfg = PlannerConfig(use_steer=False, delta=2.0, n_plan=5)
    res = plan((np.array([3.0, 3.0]), np.array([3.5, 3.0])), empty_env, StallModel(), cfg)
    assert res.success
    assert res.path.shape[0] == 2


def test_rollout_length_bounded(wall_env):
    cfg = PlannerConfig(n_plan=7)
    res = plan((np.array([2.0, 2.0]), np.array([18.0, 2.0])), wall_env,
               StallModel(), cfg)
    assert res.iterations <= 7


def test_planner_deterministic(wall_env):
    start = np.array([2.0, 2.0])
    goal = np.array([18.0, 2.0])
    view = InflatedView(wall_env, 0.0)
    expert_path = solve_query((start, goal), view,
                              ExpertConfig(cell_size=0.25, smooth_rounds=200, seed=8))
    model = LookupModel([expert_path])
    r1 = plan((start, goal), wall_env, model, PlannerConfig())
    r2 = plan((start, goal), wall_env, model, PlannerConfig())
    assert r1.success == r2.success
    np.testing.assert_array_equal(r1.path, r2.path)
    assert r1.cost == r2.cost


def test_config_validation():
    with pytest.raises(ValueError, match="n_plan"):
        PlannerConfig(n_plan=0)
    with pytest.raises(ValueError, match="delta"):
        PlannerConfig(use_steer=False, delta=0.0)
