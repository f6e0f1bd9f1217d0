"""Query sampling: uniform, non-trivial (rejection), and the
non-triviality ratio estimator.

A query is non-trivial when the straight steering connection between its
start and goal fails; the ratio of such queries under uniform sampling is
a difficulty measure for an environment.
"""

import math
from dataclasses import dataclass

import numpy as np

from .collision import InflatedView


@dataclass(frozen=True)
class Query:
    start: np.ndarray
    goal: np.ndarray

    def as_tuple(self):
        return self.start, self.goal


@dataclass(frozen=True)
class SamplerConfig:
    n_max: int = 100                  # rejection attempts before falling back
    resolution: float | None = None   # steering resolution; None = cspace default
    seed: int = 0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")


def uniform_config(view: InflatedView, rng: np.random.Generator,
                   max_attempts: int = 100000) -> np.ndarray:
    """Uniform rejection draw over the free configuration space."""
    cs = view.cspace
    for _ in range(max_attempts):
        q = cs.sample(rng)
        if view.is_valid(q):
            return q
    raise RuntimeError("free-space sampling budget exhausted; environment degenerate")


def uniform_query(view: InflatedView, rng: np.random.Generator) -> Query:
    """Independent uniform draws for start and goal."""
    return Query(uniform_config(view, rng), uniform_config(view, rng))


def non_trivial_query(view: InflatedView, cfg: SamplerConfig,
                      rng: np.random.Generator):
    """Rejection-sample a query whose straight connection is blocked.

    Draws uniform queries up to cfg.n_max times and returns the first one
    steering fails on, flagged True.  If every draw is trivial the last
    query is returned flagged False, so callers can count fallbacks.
    """
    q = None
    for _ in range(cfg.n_max):
        q = uniform_query(view, rng)
        if not view.steer(q.start, q.goal, cfg.resolution):
            return q, True
    return q, False


def estimate_nontriviality(view: InflatedView, n_samples: int, rng,
                           resolution: float | None = None):
    """Fraction of uniform queries that are non-trivial, with a 95%
    binomial confidence half-width."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    hits = 0
    for _ in range(n_samples):
        q = uniform_query(view, rng)
        if not view.steer(q.start, q.goal, resolution):
            hits += 1
    gamma = hits / n_samples
    ci = 1.96 * math.sqrt(gamma * (1.0 - gamma) / n_samples)
    return gamma, ci
