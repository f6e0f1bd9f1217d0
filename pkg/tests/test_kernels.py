"""Compiled backend and numpy fallback must agree bit-for-bit."""

import math

import numpy as np
import pytest

from ntplan import _kernels
from ntplan._kernels import _py

core = pytest.importorskip("ntplan._kernels._core")

EMPTY_V = np.zeros((0, 2))
EMPTY_L = np.zeros(0)
BASE0 = np.zeros(2)

RECTS = np.array([[4.2, 4.2, 10.8, 10.8], [13.0, 1.0, 16.0, 9.5]])
BOUNDS = np.array([0.0, 0.0, 20.0, 20.0])
VERTS = np.array([[0.4, -0.25], [0.4, 0.25], [-0.4, 0.25], [-0.4, -0.25]])
LENGTHS = np.array([1.0, 0.8, 0.6])
ARM_BOUNDS = np.array([-3.0, -3.0, 3.0, 3.0])
ARM_RECTS = np.array([[0.9, 0.9, 1.5, 1.5]])


def test_backend_is_compiled_by_default():
    assert _kernels.BACKEND == "compiled"


def _reference_splitmix(seed, n):
    # independent transcription of the splitmix64 reference recurrence
    mask = 2**64 - 1
    out = []
    x = seed & mask
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & mask
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append((z ^ (z >> 31)) >> 11)
    return [v * 2.0**-53 for v in out]


def test_splitmix_streams_match():
    py_rng = _py.SplitMix64(987654321)
    draws = [py_rng.uniform() for _ in range(1000)]
    assert all(0.0 <= u < 1.0 for u in draws)
    assert draws == _reference_splitmix(987654321, 1000)


def test_wrap_angle_matches(rng):
    for x in rng.uniform(-50, 50, 2000):
        assert _py.wrap_angle(x) == core_wrap_probe(x)


def core_wrap_probe(x):
    # _wrap is internal to the extension; probe it through config_distance
    a = np.array([0.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, float(x)])
    d = core.config_distance(a, b, 1, 1.0)
    return math.copysign(d, _py.wrap_angle(x)) if d != 0 else 0.0


def test_config_free_agreement(rng):
    qs = rng.uniform(-1, 21, (5000, 2))
    for q in qs[:50]:
        assert (_py.config_free(q, 0, EMPTY_V, EMPTY_L, BASE0, 1, RECTS, BOUNDS)
                == core.config_free(q, 0, EMPTY_V, EMPTY_L, BASE0, 1, RECTS, BOUNDS))
    m_py = _py.configs_free(qs, 0, EMPTY_V, EMPTY_L, BASE0, 1, RECTS, BOUNDS)
    m_c = core.configs_free(qs, 0, EMPTY_V, EMPTY_L, BASE0, 1, RECTS, BOUNDS)
    np.testing.assert_array_equal(m_py, m_c)


def test_rigid_free_agreement(rng):
    qs = np.column_stack([rng.uniform(0, 20, 3000), rng.uniform(0, 20, 3000),
                          rng.uniform(-math.pi, math.pi, 3000)])
    m_py = _py.configs_free(qs, 1, VERTS, EMPTY_L, BASE0, 1, RECTS, BOUNDS)
    m_c = core.configs_free(qs, 1, VERTS, EMPTY_L, BASE0, 1, RECTS, BOUNDS)
    np.testing.assert_array_equal(m_py, m_c)


def test_arm_free_agreement(rng):
    qs = rng.uniform(-math.pi, math.pi, (3000, 3))
    for contained in (0, 1):
        m_py = _py.configs_free(qs, 2, EMPTY_V, LENGTHS, BASE0, contained, ARM_RECTS, ARM_BOUNDS)
        m_c = core.configs_free(qs, 2, EMPTY_V, LENGTHS, BASE0, contained, ARM_RECTS, ARM_BOUNDS)
        np.testing.assert_array_equal(m_py, m_c)


def test_fk_agreement(rng):
    for _ in range(200):
        q = rng.uniform(-math.pi, math.pi, 3)
        np.testing.assert_array_equal(_py.fk_points(q, LENGTHS, BASE0),
                                      core.fk_points(q, LENGTHS, BASE0))


def test_segment_agreement(rng):
    rect = RECTS[0].copy()
    for _ in range(2000):
        p = rng.uniform(0, 20, 2)
        q = rng.uniform(0, 20, 2)
        assert (_py.segment_hits_rect(p[0], p[1], q[0], q[1], rect)
                == core.segment_hits_rect(p[0], p[1], q[0], q[1], rect))


def test_distance_agreement(rng):
    for kind, d, w in ((0, 2, 1.0), (1, 3, 0.7), (2, 4, 1.0)):
        for _ in range(500):
            a = rng.uniform(-4, 4, d)
            b = rng.uniform(-4, 4, d)
            lengths = np.ones(d)
            assert (_py.config_distance(a, b, kind, w)
                    == core.config_distance(a, b, kind, w))


def test_steer_agreement(rng):
    cases = [
        (0, EMPTY_V, EMPTY_L, BASE0, 1, 1.0, RECTS, BOUNDS, 0.05, 20.0),
        (1, VERTS, EMPTY_L, BASE0, 1, 1.0, RECTS, BOUNDS, 0.05, 20.0),
        (2, EMPTY_V, LENGTHS, BASE0, 1, 1.0, ARM_RECTS, ARM_BOUNDS, 0.02, None),
    ]
    for kind, verts, lengths, base, contained, w, rects, bounds, res, span in cases:
        d = 2 if kind == 0 else (3 if kind == 1 else lengths.shape[0])
        for _ in range(400):
            if kind == 2:
                a = rng.uniform(-math.pi, math.pi, d)
                b = rng.uniform(-math.pi, math.pi, d)
            else:
                a = rng.uniform(0, span, d)
                b = rng.uniform(0, span, d)
                if kind == 1:
                    a[2] = rng.uniform(-math.pi, math.pi)
                    b[2] = rng.uniform(-math.pi, math.pi)
            assert (_py.steer(a, b, kind, verts, lengths, base, contained, w, rects, bounds, res)
                    == core.steer(a, b, kind, verts, lengths, base, contained, w, rects, bounds, res))


def test_rrt_star_agreement():
    start = np.array([2.0, 2.0])
    goal = np.array([18.0, 18.0])
    for seed in (1, 7, 42, 99, 12345):
        r_py = _py.rrt_star(start, goal, 0, EMPTY_V, EMPTY_L, BASE0, 1, 1.0,
                            RECTS, BOUNDS, 0.05, 400, 2.0, 0.1, 10.0, seed)
        r_c = core.rrt_star(start, goal, 0, EMPTY_V, EMPTY_L, BASE0, 1, 1.0,
                            RECTS, BOUNDS, 0.05, 400, 2.0, 0.1, 10.0, seed)
        assert (r_py[0] is None) == (r_c[0] is None)
        if r_py[0] is not None:
            np.testing.assert_array_equal(r_py[0], r_c[0])
        np.testing.assert_array_equal(r_py[1], r_c[1])   # trace iterations
        np.testing.assert_array_equal(r_py[2], r_c[2])   # trace costs
        assert r_py[3] == r_c[3]                          # node count


def test_rrt_star_agreement_se2_and_arm():
    start = np.array([1.0, 1.0, 0.0])
    goal = np.array([18.0, 18.0, 1.0])
    r_py = _py.rrt_star(start, goal, 1, VERTS, EMPTY_L, BASE0, 1, 1.0,
                        RECTS, BOUNDS, 0.05, 300, 1.5, 0.1, 10.0, 5)
    r_c = core.rrt_star(start, goal, 1, VERTS, EMPTY_L, BASE0, 1, 1.0,
                        RECTS, BOUNDS, 0.05, 300, 1.5, 0.1, 10.0, 5)
    assert (r_py[0] is None) == (r_c[0] is None)
    if r_py[0] is not None:
        np.testing.assert_array_equal(r_py[0], r_c[0])

    start = np.array([0.0, 0.0, 0.0])
    goal = np.array([2.0, -1.0, 0.5])
    r_py = _py.rrt_star(start, goal, 2, EMPTY_V, LENGTHS, BASE0, 1, 1.0,
                        ARM_RECTS, ARM_BOUNDS, 0.02, 300, 0.8, 0.1, 6.0, 5)
    r_c = core.rrt_star(start, goal, 2, EMPTY_V, LENGTHS, BASE0, 1, 1.0,
                        ARM_RECTS, ARM_BOUNDS, 0.02, 300, 0.8, 0.1, 6.0, 5)
    assert (r_py[0] is None) == (r_c[0] is None)
    if r_py[0] is not None:
        np.testing.assert_array_equal(r_py[0], r_c[0])
