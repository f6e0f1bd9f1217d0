"""Non-trivial query sampling and benchmarking for learned next-state planners."""

__version__ = "0.1.0"

from ._kernels import BACKEND

__all__ = [
    "BACKEND",
    "__version__",
    "Environment",
    "InflatedView",
    "PlannerConfig",
    "bundled",
    "estimate_nontriviality",
    "generate_dataset",
    "load_environment",
    "plan",
    "solve_query",
    "steer_to",
    "train",
]


def __getattr__(name):
    # lazy re-exports of the main entry points
    from . import bench, collision, datagen, envs, expert, geometry, mlp, planner, sampling, steering
    table = {
        "Environment": geometry.Environment,
        "InflatedView": collision.InflatedView,
        "PlannerConfig": planner.PlannerConfig,
        "bundled": envs.bundled,
        "estimate_nontriviality": sampling.estimate_nontriviality,
        "generate_dataset": datagen.generate_dataset,
        "load_environment": geometry.load_environment,
        "plan": planner.plan,
        "solve_query": expert.solve_query,
        "steer_to": steering.steer_to,
        "train": mlp.train,
        "run_grid": bench.run_grid,
    }
    if name in table:
        return table[name]
    raise AttributeError(f"module 'ntplan' has no attribute {name!r}")
