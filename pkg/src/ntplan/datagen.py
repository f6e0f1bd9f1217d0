"""Dataset generation: biased query sampling, sample inclusion with
optional pruning, and a reproducible binary dataset format.

Each supervised sample is ((current, goal) -> next) extracted from an
expert path.  With pruning enabled, samples whose current state already
steers straight to the final goal are dropped, keeping only the
non-trivial stretches of each path.
"""

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .collision import InflatedView
from .expert import ExpertConfig, solve_query
from .geometry import Environment, environment_to_dict
from .sampling import Query, SamplerConfig, estimate_nontriviality, non_trivial_query, uniform_query
from .steering import as_path, path_cost

_MAGIC = b"NTPLDS01"

# canonical presets: share of non-trivially sampled queries, pruning flag
PRESETS = {
    "uniform": (0.0, False),
    "mixed": (0.5, False),
    "nontrivial": (1.0, False),
    "pruned": (1.0, True),
}
PRESET_ORDER = ("uniform", "mixed", "nontrivial", "pruned")


@dataclass(frozen=True)
class DatasetConfig:
    p_nontrivial: float = 0.0
    prune: bool = False
    k_train: int = 1000
    padding: float = 0.0
    expert: ExpertConfig = field(default_factory=ExpertConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    seed: int = 0
    retry_cap: int = 50          # expert re-draw attempts per query slot
    gamma_samples: int = 2000    # size of the difficulty estimate in metadata

    def __post_init__(self):
        if not 0.0 <= self.p_nontrivial <= 1.0:
            raise ValueError(f"p_nontrivial must be in [0, 1], got {self.p_nontrivial}")
        if self.k_train < 1:
            raise ValueError(f"k_train must be >= 1, got {self.k_train}")
        if self.padding < 0:
            raise ValueError(f"padding must be >= 0, got {self.padding}")


def preset_config(name: str, **overrides) -> DatasetConfig:
    """DatasetConfig for one of the four canonical presets."""
    p_nt, prune = PRESETS[name]
    return DatasetConfig(p_nontrivial=p_nt, prune=prune, **overrides)


@dataclass
class Dataset:
    """Flat sample arrays plus the per-query audit table and metadata."""

    current: np.ndarray        # (N, d)
    goal: np.ndarray           # (N, d)
    next: np.ndarray           # (N, d)
    sample_query: np.ndarray   # (N,) uint32 owning query index
    sample_nontrivial: np.ndarray  # (N,) bool: owning query was non-trivial
    q_start: np.ndarray        # (K, d)
    q_goal: np.ndarray         # (K, d)
    q_nontrivial: np.ndarray   # (K,) bool
    q_fallback: np.ndarray     # (K,) bool: non-trivial sampler fell back
    q_cost: np.ndarray         # (K,) expert path cost
    q_n_samples: np.ndarray    # (K,) uint32
    metadata: dict

    @property
    def n_samples(self) -> int:
        return self.current.shape[0]

    @property
    def n_queries(self) -> int:
        return self.q_start.shape[0]

    @property
    def dim(self) -> int:
        return self.current.shape[1]


def include_data(samples: list, path, prune: bool, view: InflatedView,
                 resolution: float | None = None) -> list:
    """Append ((current, goal) -> next) rows from an expert path.

    With prune=True a row is skipped when its current state steers
    straight to the path's final goal.  Rows keep path order.
    """
    path = as_path(path, view.cspace.dim)
    L = path.shape[0]
    if L < 2:
        raise ValueError("paths contribute samples only with >= 2 waypoints")
    goal = path[-1]
    for i in range(L - 1):
        if prune and view.steer(path[i], goal, resolution):
            continue
        if np.array_equal(path[i], path[i + 1]):
            continue  # degenerate duplicate waypoint
        samples.append((path[i].copy(), goal.copy(), path[i + 1].copy()))
    return samples


def _expert_seed(seed: int, query_index: int, attempt: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**63 - 1),
                                spawn_key=(query_index, attempt))
    return int(ss.generate_state(1, np.uint64)[0])


def _solve_slot(j: int, view: InflatedView, cfg: DatasetConfig, resolution: float):
    """One query slot: sample, solve (redrawing on expert failure), extract
    samples.  Depends only on (cfg.seed, j), so slots can run in any order
    or process and still assemble into an identical dataset."""
    path = None
    failures = 0
    for attempt in range(cfg.retry_cap):
        rng = np.random.default_rng([cfg.seed, 1, j, attempt])
        fell_back = False
        if rng.random() < cfg.p_nontrivial:
            query, flag = non_trivial_query(view, cfg.sampler, rng)
            fell_back = not flag
        else:
            query = uniform_query(view, rng)
        path = solve_query(query.as_tuple(), view, cfg.expert,
                           seed=_expert_seed(cfg.seed, j, attempt))
        if path is not None:
            break
        failures += 1
    if path is None:
        raise RuntimeError(f"expert failed {cfg.retry_cap} redraws for query slot {j}")
    nontrivial = not view.steer(query.start, query.goal, resolution)
    rows = include_data([], path, cfg.prune, view, resolution)
    cost = path_cost(path, view.cspace)
    return j, query.start, query.goal, nontrivial, fell_back, cost, rows, failures


_POOL_ENV = {}


def _pool_init(env_dict, cfg, resolution):
    from .geometry import environment_from_dict
    _POOL_ENV["view"] = InflatedView(environment_from_dict(env_dict), cfg.padding)
    _POOL_ENV["cfg"] = cfg
    _POOL_ENV["resolution"] = resolution


def _pool_slot(j):
    return _solve_slot(j, _POOL_ENV["view"], _POOL_ENV["cfg"], _POOL_ENV["resolution"])


def generate_dataset(env: Environment, cfg: DatasetConfig, jobs: int = 1) -> Dataset:
    """Solve cfg.k_train sampled queries with the expert and collect samples.

    Per query, a Bernoulli(p_nontrivial) draw picks the non-trivial
    sampler over plain uniform sampling; expert failures redraw the query
    (they never consume the budget) up to cfg.retry_cap attempts.  The
    result is deterministic given cfg.seed, independent of `jobs`: each
    slot derives its own random streams and results assemble in slot
    order.
    """
    view = InflatedView(env, cfg.padding)
    cs = view.cspace
    resolution = cfg.sampler.resolution or cs.default_resolution

    gamma, gamma_ci = estimate_nontriviality(
        view, cfg.gamma_samples, np.random.default_rng([cfg.seed, 0x6A77]),
        resolution)

    samples = []
    q_start = np.empty((cfg.k_train, cs.dim))
    q_goal = np.empty((cfg.k_train, cs.dim))
    q_nontrivial = np.zeros(cfg.k_train, dtype=bool)
    q_fallback = np.zeros(cfg.k_train, dtype=bool)
    q_cost = np.zeros(cfg.k_train)
    q_n_samples = np.zeros(cfg.k_train, dtype=np.uint32)
    sample_query = []
    expert_failures = 0
    fallbacks = 0

    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from .geometry import environment_to_dict as env_to_dict
        with ProcessPoolExecutor(max_workers=jobs, initializer=_pool_init,
                                 initargs=(env_to_dict(env), cfg, resolution)) as pool:
            results = sorted(pool.map(_pool_slot, range(cfg.k_train), chunksize=16))
    else:
        results = [_solve_slot(j, view, cfg, resolution) for j in range(cfg.k_train)]

    for j, start, goal, nontrivial, fell_back, cost, rows, failures in results:
        expert_failures += failures
        fallbacks += int(fell_back)
        q_start[j] = start
        q_goal[j] = goal
        q_nontrivial[j] = nontrivial
        q_fallback[j] = fell_back
        q_cost[j] = cost
        samples.extend(rows)
        q_n_samples[j] = len(rows)
        sample_query.extend([j] * len(rows))

    d = cs.dim
    if samples:
        current = np.stack([s[0] for s in samples])
        goals = np.stack([s[1] for s in samples])
        nxt = np.stack([s[2] for s in samples])
    else:
        current = np.zeros((0, d))
        goals = np.zeros((0, d))
        nxt = np.zeros((0, d))
    sample_query = np.asarray(sample_query, dtype=np.uint32)
    sample_nontrivial = q_nontrivial[sample_query] if sample_query.size else \
        np.zeros(0, dtype=bool)

    metadata = {
        "format": _MAGIC.decode(),
        "tool_version": __version__,
        "environment": environment_to_dict(env),
        "config": {
            "p_nontrivial": cfg.p_nontrivial,
            "prune": cfg.prune,
            "k_train": cfg.k_train,
            "padding": cfg.padding,
            "seed": cfg.seed,
            "retry_cap": cfg.retry_cap,
            "sampler": {"n_max": cfg.sampler.n_max, "seed": cfg.sampler.seed,
                        "resolution": cfg.sampler.resolution},
            "expert": {
                "planner": cfg.expert.planner, "cell_size": cfg.expert.cell_size,
                "max_iters": cfg.expert.max_iters, "step_size": cfg.expert.step_size,
                "goal_bias": cfg.expert.goal_bias, "rewire_gamma": cfg.expert.rewire_gamma,
                "smooth_rounds": cfg.expert.smooth_rounds,
                "resolution": cfg.expert.resolution, "seed": cfg.expert.seed,
            },
        },
        "resolution": resolution,
        "nontriviality": gamma,
        "nontriviality_ci95": gamma_ci,
        "expert_failures": expert_failures,
        "fallbacks": fallbacks,
        "n_queries": int(cfg.k_train),
        "n_samples": int(current.shape[0]),
    }
    return Dataset(current=current, goal=goals, next=nxt,
                   sample_query=sample_query, sample_nontrivial=sample_nontrivial,
                   q_start=q_start, q_goal=q_goal, q_nontrivial=q_nontrivial,
                   q_fallback=q_fallback, q_cost=q_cost, q_n_samples=q_n_samples,
                   metadata=metadata)


def validate_purity(ds: Dataset, env: Environment) -> int:
    """Re-check the pruning guarantee sample by sample.

    Returns the number of stored samples whose current state steers
    straight to its goal (must be 0 for pruned datasets).
    """
    view = InflatedView(env, ds.metadata["config"]["padding"])
    resolution = ds.metadata["resolution"]
    violations = 0
    for i in range(ds.n_samples):
        if view.steer(ds.current[i], ds.goal[i], resolution):
            violations += 1
    return violations


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _meta_bytes(metadata: dict) -> bytes:
    return json.dumps(metadata, sort_keys=True, separators=(",", ":")).encode()


def dataset_bytes(ds: Dataset) -> bytes:
    meta = _meta_bytes(ds.metadata)
    parts = [_MAGIC, struct.pack("<III", ds.n_queries, ds.n_samples, ds.dim),
             struct.pack("<I", len(meta)), meta]
    for arr, dtype in (
        (ds.q_start, "<f8"), (ds.q_goal, "<f8"),
        (ds.q_nontrivial, "u1"), (ds.q_fallback, "u1"),
        (ds.q_cost, "<f8"), (ds.q_n_samples, "<u4"),
        (ds.sample_query, "<u4"), (ds.sample_nontrivial, "u1"),
        (ds.current, "<f8"), (ds.goal, "<f8"), (ds.next, "<f8"),
    ):
        parts.append(np.ascontiguousarray(arr).astype(dtype, copy=False).tobytes())
    return b"".join(parts)


def save_dataset(ds: Dataset, path) -> str:
    """Write the binary record file plus a sidecar JSON metadata file.

    Returns the hex digest of the written bytes.
    """
    blob = dataset_bytes(ds)
    with open(path, "wb") as fh:
        fh.write(blob)
    with open(f"{path}.meta.json", "w") as fh:
        json.dump(ds.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return hashlib.sha256(blob).hexdigest()


def load_dataset(path) -> Dataset:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise ValueError(f"{path} is not a dataset file (bad magic)")
    off = 8
    n_q, n_s, d = struct.unpack_from("<III", blob, off)
    off += 12
    (meta_len,) = struct.unpack_from("<I", blob, off)
    off += 4
    metadata = json.loads(blob[off:off + meta_len].decode())
    off += meta_len

    def take(shape, dtype):
        nonlocal off
        count = int(np.prod(shape)) if shape else 0
        arr = np.frombuffer(blob, dtype=dtype, count=count, offset=off).reshape(shape)
        off += arr.nbytes
        return arr.copy()

    q_start = take((n_q, d), "<f8")
    q_goal = take((n_q, d), "<f8")
    q_nontrivial = take((n_q,), "u1").astype(bool)
    q_fallback = take((n_q,), "u1").astype(bool)
    q_cost = take((n_q,), "<f8")
    q_n_samples = take((n_q,), "<u4")
    sample_query = take((n_s,), "<u4")
    sample_nontrivial = take((n_s,), "u1").astype(bool)
    current = take((n_s, d), "<f8")
    goal = take((n_s, d), "<f8")
    nxt = take((n_s, d), "<f8")
    return Dataset(current=current, goal=goal, next=nxt, sample_query=sample_query,
                   sample_nontrivial=sample_nontrivial, q_start=q_start, q_goal=q_goal,
                   q_nontrivial=q_nontrivial, q_fallback=q_fallback, q_cost=q_cost,
                   q_n_samples=q_n_samples, metadata=metadata)


def dataset_to_text(ds: Dataset) -> str:
    """Delimited text export for manual inspection."""
    d = ds.dim
    cols = (["query", "nontrivial"]
            + [f"current_{k}" for k in range(d)]
            + [f"goal_{k}" for k in range(d)]
            + [f"next_{k}" for k in range(d)])
    lines = [",".join(cols)]
    for i in range(ds.n_samples):
        vals = ([str(int(ds.sample_query[i])), str(int(ds.sample_nontrivial[i]))]
                + [f"{v!r}" for v in ds.current[i]]
                + [f"{v!r}" for v in ds.goal[i]]
                + [f"{v!r}" for v in ds.next[i]])
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
