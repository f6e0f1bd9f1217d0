import numpy as np
import pytest

from ntplan.collision import InflatedView
from ntplan.envs import (SHOWCASE_TRIVIAL_QUERY, bundled, bundled_environments,
                         default_padding, family_of)
from ntplan.sampling import estimate_nontriviality


def test_all_bundled_environments_load():
    envs = bundled_environments()
    assert len(envs) >= 13
    for name, env in envs.items():
        assert env.name == name
        view = InflatedView(env, default_padding(env))
        # padded free space must remain sampleable
        rng = np.random.default_rng(0)
        cs = env.cspace()
        assert any(view.is_valid(cs.sample(rng)) for _ in range(2000))


def test_unknown_name():
    with pytest.raises(KeyError, match="unknown bundled"):
        bundled("nope")


def test_families():
    assert family_of(bundled("point_1")) == "point"
    assert family_of(bundled("rigid_3")) == "rigid"
    assert family_of(bundled("arm_4")) == "arm"
    assert default_padding(bundled("point_0")) == 0.8
    assert default_padding(bundled("rigid_0")) == 0.4


def test_point_family_difficulty_spread():
    gammas = {}
    for name in ("point_0", "point_1", "point_2", "point_3"):
        env = bundled(name)
        view = InflatedView(env, 0.8)
        gammas[name], _ = estimate_nontriviality(view, 3000, 13)
    assert gammas["point_0"] < 0.35
    assert 0.30 < gammas["point_1"] < 0.45
    assert 0.50 < gammas["point_2"] < 0.70
    assert gammas["point_3"] > 0.60
    # the family spans the easy-to-hard range
    assert max(gammas.values()) - min(gammas.values()) > 0.3


def test_rigid_grid_env_is_hard_enough():
    # the rigid benchmark environment must sit clearly above 0.5
    view = InflatedView(bundled("rigid_0"), 0.4)
    gamma, ci = estimate_nontriviality(view, 5000, 17)
    assert gamma - ci >= 0.5


def test_showcase_query_is_trivial():
    env = bundled("rigid_0")
    start, goal = SHOWCASE_TRIVIAL_QUERY["rigid_0"]
    unpadded = InflatedView(env, 0.0)
    padded = InflatedView(env, default_padding(env))
    assert unpadded.is_valid(start) and unpadded.is_valid(goal)
    assert unpadded.steer(start, goal)
    # trivial under the data padding too, so pruning removes anything like it
    assert padded.is_valid(start) and padded.is_valid(goal)
    assert padded.steer(start, goal)
