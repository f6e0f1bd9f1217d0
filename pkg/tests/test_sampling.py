import numpy as np
import pytest

from ntplan.collision import InflatedView
from ntplan.geometry import Environment, Obstacle, PointRobot, Workspace
from ntplan.sampling import (SamplerConfig, estimate_nontriviality,
                             non_trivial_query, uniform_query)
from tests.oracles import crossing_probability_oracle


def test_uniform_query_valid(box_env, rng):
    view = InflatedView(box_env, 0.0)
    for _ in range(200):
        q = uniform_query(view, rng)
        assert view.is_valid(q.start)
        assert view.is_valid(q.goal)


def test_uniform_query_in_tiny_free_space(rng):
    # obstacles cover almost everything except a thin border strip
    env = Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                      obstacles=(Obstacle(10, 10, 9.5, 9.5),), name="tight")
    view = InflatedView(env, 0.0)
    for _ in range(50):
        q = uniform_query(view, rng)
        assert view.is_valid(q.start) and view.is_valid(q.goal)


def test_uniform_sampling_statistics(empty_env):
    view = InflatedView(empty_env, 0.0)
    rng = np.random.default_rng(8)
    pts = np.array([uniform_query(view, rng).start for _ in range(50000)])
    # mean of U(0, 20) is 10 with sigma/sqrt(n) ~ 0.026
    assert abs(pts[:, 0].mean() - 10.0) < 0.11
    assert abs(pts[:, 1].mean() - 10.0) < 0.11
    hist, _ = np.histogram(pts[:, 0], bins=10, range=(0, 20))
    assert hist.min() > 0.9 * 5000 and hist.max() < 1.1 * 5000


def test_non_trivial_query_flags(wall_view, rng):
    cfg = SamplerConfig(n_max=100)
    for _ in range(200):
        q, flag = non_trivial_query(wall_view, cfg, rng)
        if flag:
            assert not wall_view.steer(q.start, q.goal)
        assert wall_view.is_valid(q.start) and wall_view.is_valid(q.goal)


def test_non_trivial_fallback_in_empty_env(empty_env, rng):
    view = InflatedView(empty_env, 0.0)
    cfg = SamplerConfig(n_max=50)
    q, flag = non_trivial_query(view, cfg, rng)
    assert not flag
    assert view.is_valid(q.start)


def test_non_trivial_hit_rate_matches_ratio(wall_view):
    rng = np.random.default_rng(21)
    gamma, _ = estimate_nontriviality(wall_view, 4000, np.random.default_rng(99))
    cfg = SamplerConfig(n_max=100)
    hits = sum(non_trivial_query(wall_view, cfg, rng)[1] for _ in range(1000))
    # fallback chance is (1 - gamma)^100, negligible for this wall
    assert gamma > 0.2
    assert hits >= 995


def test_estimator_empty_env_exact_zero(empty_env):
    view = InflatedView(empty_env, 0.0)
    gamma, ci = estimate_nontriviality(view, 2000, 5)
    assert gamma == 0.0
    assert ci == 0.0


def test_estimator_against_exact_crossing_oracle(wall_view):
    gamma, ci = estimate_nontriviality(wall_view, 20000, 7)
    oracle = crossing_probability_oracle(wall_view.rects, wall_view.bounds,
                                         1_000_000, seed=12345)
    assert gamma == pytest.approx(oracle, abs=0.02)
    assert ci < 0.01


def test_estimator_deterministic_and_seed_consistent(wall_view):
    g1, _ = estimate_nontriviality(wall_view, 5000, 42)
    g2, _ = estimate_nontriviality(wall_view, 5000, 42)
    assert g1 == g2
    g3, ci3 = estimate_nontriviality(wall_view, 5000, 43)
    # disjoint seeds agree within 3 sigma
    sigma = ci3 / 1.96
    assert abs(g1 - g3) < 3 * max(sigma, 1e-3)


def test_estimator_monotone_in_obstacles(rng):
    base = Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                       obstacles=(Obstacle(10, 7.5, 1.0, 7.5),), name="one")
    more = Environment(workspace=Workspace(0, 20, 0, 20), robot=PointRobot(),
                       obstacles=(Obstacle(10, 7.5, 1.0, 7.5),
                                  Obstacle(5, 15, 1.5, 1.5)), name="two")
    g1, c1 = estimate_nontriviality(InflatedView(base, 0.0), 8000, 3)
    g2, c2 = estimate_nontriviality(InflatedView(more, 0.0), 8000, 3)
    sigma = max(c1, c2) / 1.96
    assert g2 >= g1 - 3 * sigma


def test_sampler_config_invariants():
    with pytest.raises(ValueError, match="n_max"):
        SamplerConfig(n_max=0)
