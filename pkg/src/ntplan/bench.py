"""Experiment grid: datasets -> models -> evaluation tables.

For one environment the grid generates the four preset datasets, trains
one model per dataset, and evaluates every model on unseen uniform and
non-trivial test queries, with and without the steering function.  All
intermediate artifacts are cached content-addressed under the grid's
cache directory, so reruns are cheap and byte-identical.

Wall-clock timings are written to a separate timings file; the report and
metrics files contain only deterministic quantities.
"""

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .collision import InflatedView
from .datagen import (PRESET_ORDER, DatasetConfig, generate_dataset, load_dataset,
                      preset_config, save_dataset)
from .envs import bundled, default_padding
from .expert import ExpertConfig, solve_query
from .geometry import Environment, environment_to_dict, load_environment
from .mlp import TrainConfig, load_model, save_model, train
from .planner import PlannerConfig, plan
from .render import render_svg, save_svg
from .sampling import SamplerConfig, estimate_nontriviality, non_trivial_query, uniform_query
from .steering import path_cost


@dataclass
class MetricRow:
    model_id: str
    query_kind: str          # "uniform" | "nontrivial"
    use_steer: bool
    seed: int
    success_ratio: float
    cost_ratio: float        # mean neural/expert cost over mutually solved queries
    n_success: int
    n_total: int
    n_expert_failed: int
    mean_wall_time: float


@dataclass(frozen=True)
class GridConfig:
    env: str = "rigid_0"                 # bundled name or environment file path
    k_train: int = 2000
    k_test: int = 200
    seeds: tuple = (0, 1, 2)
    padding: float | None = None         # None: family default
    presets: tuple = PRESET_ORDER
    steer_modes: tuple = (True, False)
    expert: ExpertConfig = field(default_factory=lambda: ExpertConfig(
        max_iters=1500, step_size=0.8, goal_bias=0.1, smooth_rounds=60))
    train: TrainConfig = field(default_factory=TrainConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    gamma_samples: int = 4000
    out_dir: str = "grid_out"
    cache_dir: str | None = None
    jobs: int = 1                        # worker processes; never affects results

    def resolve_env(self) -> Environment:
        if os.path.exists(self.env):
            return load_environment(self.env)
        return bundled(self.env)


def _nanmean(arr):
    arr = np.asarray(arr, dtype=np.float64)
    finite = arr[np.isfinite(arr)]
    return float(finite.mean()) if finite.size else float("nan")


def _nanstd(arr):
    arr = np.asarray(arr, dtype=np.float64)
    finite = arr[np.isfinite(arr)]
    return float(finite.std(ddof=1)) if finite.size > 1 else 0.0


def _cfg_dict(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _cfg_dict(getattr(obj, k)) for k in obj.__dataclass_fields__}
    if isinstance(obj, (tuple, list)):
        return [_cfg_dict(v) for v in obj]
    return obj


def _stage_key(stage: str, payload: dict) -> str:
    blob = json.dumps({"stage": stage, "tool": __version__, **payload},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


def _save_arrays(path, arrays: dict):
    names = sorted(arrays)
    with open(path, "wb") as fh:
        fh.write(b"NTPLAR01")
        head = json.dumps([[n, list(arrays[n].shape), str(arrays[n].dtype)] for n in names],
                          separators=(",", ":")).encode()
        fh.write(struct.pack("<I", len(head)))
        fh.write(head)
        for n in names:
            fh.write(np.ascontiguousarray(arrays[n]).tobytes())


def _load_arrays(path) -> dict:
    with open(path, "rb") as fh:
        blob = fh.read()
    assert blob[:8] == b"NTPLAR01"
    (n,) = struct.unpack_from("<I", blob, 8)
    head = json.loads(blob[12:12 + n].decode())
    off = 12 + n
    out = {}
    for name, shape, dtype in head:
        arr = np.frombuffer(blob, dtype=np.dtype(dtype),
                            count=int(np.prod(shape)) if shape else 1,
                            offset=off).reshape(shape)
        off += arr.nbytes
        out[name] = arr.copy()
    return out


# ---------------------------------------------------------------------------
# test queries and expert reference solutions
# ---------------------------------------------------------------------------

def make_test_queries(env: Environment, kind: str, k: int, seed: int,
                      sampler: SamplerConfig, resolution=None):
    """Unseen query batch on the unpadded environment.

    kind "uniform": plain uniform pairs.  kind "nontrivial": rejection
    sampled; re-drawn on the rare fallback so every query is non-trivial.
    """
    view = InflatedView(env, 0.0)
    rng = np.random.default_rng([seed, 0xE7A1])
    starts = np.empty((k, view.cspace.dim))
    goals = np.empty((k, view.cspace.dim))
    for i in range(k):
        if kind == "uniform":
            q = uniform_query(view, rng)
        elif kind == "nontrivial":
            for _ in range(50):
                q, flag = non_trivial_query(view, sampler, rng)
                if flag:
                    break
            else:
                raise RuntimeError("could not sample a non-trivial test query")
        else:
            raise ValueError(f"unknown query kind {kind!r}")
        starts[i] = q.start
        goals[i] = q.goal
    return starts, goals


_REF_STATE = {}


def _ref_init(env_dict, cfg):
    from .geometry import environment_from_dict
    _REF_STATE["view"] = InflatedView(environment_from_dict(env_dict), 0.0)
    _REF_STATE["cfg"] = cfg


def _ref_solve(args):
    i, start, goal, seed = args
    view = _REF_STATE["view"]
    path = solve_query((start, goal), view, _REF_STATE["cfg"], seed=seed)
    return i, (path_cost(path, view.cspace) if path is not None else float("nan"))


def expert_reference(env: Environment, starts, goals, cfg: ExpertConfig, seed: int,
                     jobs: int = 1):
    """Expert costs on the unpadded environment for cost-ratio denominators.

    Per-query seeds make the result independent of worker count.
    """
    view = InflatedView(env, 0.0)
    k = starts.shape[0]
    costs = np.full(k, np.nan)
    ok = np.zeros(k, dtype=np.uint8)
    tasks = [(i, starts[i], goals[i], seed * 1000003 + i) for i in range(k)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs, initializer=_ref_init,
                                 initargs=(environment_to_dict(env), cfg)) as pool:
            results = list(pool.map(_ref_solve, tasks, chunksize=8))
    else:
        _ref_init(environment_to_dict(env), cfg)
        results = [_ref_solve(t) for t in tasks]
    for i, c in results:
        if np.isfinite(c):
            costs[i] = c
            ok[i] = 1
    return costs, ok


def evaluate(model_id: str, model, env: Environment, starts, goals,
             expert_costs, expert_ok, cfg: PlannerConfig, query_kind: str,
             seed: int) -> MetricRow:
    """Run the neural planner over a query batch and aggregate metrics."""
    k = starts.shape[0]
    n_success = 0
    ratios = []
    wall = 0.0
    for i in range(k):
        res = plan((starts[i], goals[i]), env, model, cfg)
        wall += res.wall_time
        if res.success:
            n_success += 1
            if expert_ok[i]:
                ratios.append(res.cost / expert_costs[i])
    return MetricRow(
        model_id=model_id, query_kind=query_kind, use_steer=cfg.use_steer,
        seed=seed, success_ratio=n_success / k,
        cost_ratio=float(np.mean(ratios)) if ratios else float("nan"),
        n_success=n_success, n_total=k,
        n_expert_failed=int(k - expert_ok.sum()),
        mean_wall_time=wall / k)


# ---------------------------------------------------------------------------
# the grid
# ---------------------------------------------------------------------------

class GridRunner:
    def __init__(self, cfg: GridConfig, log=print):
        self.cfg = cfg
        self.env = cfg.resolve_env()
        self.padding = cfg.padding if cfg.padding is not None else default_padding(self.env)
        self.cache_dir = cfg.cache_dir or os.path.join(cfg.out_dir, "cache")
        self.log = log or (lambda *a, **k: None)
        os.makedirs(cfg.out_dir, exist_ok=True)
        os.makedirs(self.cache_dir, exist_ok=True)
        self.env_dict = environment_to_dict(self.env)

    def _cache_path(self, stage, payload, ext):
        return os.path.join(self.cache_dir, f"{_stage_key(stage, payload)}.{ext}")

    def dataset_config(self, preset: str, seed: int) -> DatasetConfig:
        cfg = self.cfg
        return preset_config(
            preset, k_train=cfg.k_train, padding=self.padding, expert=cfg.expert,
            sampler=cfg.sampler, seed=seed * 100 + PRESET_ORDER.index(preset),
            gamma_samples=cfg.gamma_samples)

    def dataset(self, preset: str, seed: int):
        dcfg = self.dataset_config(preset, seed)
        payload = {"env": self.env_dict, "cfg": _cfg_dict(dcfg)}
        path = self._cache_path("dataset", payload, "ntds")
        if not os.path.exists(path):
            self.log(f"  dataset {preset} seed={seed} ...")
            ds = generate_dataset(self.env, dcfg, jobs=self.cfg.jobs)
            save_dataset(ds, path)
            return ds, path
        return load_dataset(path), path

    def model(self, preset: str, seed: int):
        dcfg = self.dataset_config(preset, seed)
        tcfg = self.cfg.train
        payload = {"env": self.env_dict, "data": _cfg_dict(dcfg),
                   "train": _cfg_dict(tcfg), "seed": seed}
        path = self._cache_path("model", payload, "ntpm")
        if not os.path.exists(path):
            ds, _ = self.dataset(preset, seed)
            self.log(f"  train {preset} seed={seed} ({ds.n_samples} samples) ...")
            tcfg_seeded = TrainConfig(
                epochs=tcfg.epochs, batch_size=tcfg.batch_size, lr=tcfg.lr,
                beta1=tcfg.beta1, beta2=tcfg.beta2, eps=tcfg.eps,
                val_split=tcfg.val_split, hidden=tcfg.hidden,
                seed=seed * 100 + PRESET_ORDER.index(preset))
            model, report = train(ds, tcfg_seeded, cs=self.env.cspace())
            save_model(model, path)
            with open(path + ".report.json", "w") as fh:
                json.dump({"final_train_loss": report["final_train_loss"],
                           "n_train": report["n_train"], "n_val": report["n_val"]},
                          fh, sort_keys=True)
            return model, path
        return load_model(path), path

    def test_queries(self, kind: str, seed: int):
        payload = {"env": self.env_dict, "kind": kind, "k": self.cfg.k_test,
                   "seed": seed, "sampler": _cfg_dict(self.cfg.sampler)}
        path = self._cache_path("queries", payload, "bin")
        if not os.path.exists(path):
            starts, goals = make_test_queries(self.env, kind, self.cfg.k_test,
                                              seed, self.cfg.sampler)
            _save_arrays(path, {"starts": starts, "goals": goals})
        arrs = _load_arrays(path)
        return arrs["starts"], arrs["goals"]

    def expert_costs(self, kind: str, seed: int):
        payload = {"env": self.env_dict, "kind": kind, "k": self.cfg.k_test,
                   "seed": seed, "sampler": _cfg_dict(self.cfg.sampler),
                   "expert": _cfg_dict(self.cfg.expert)}
        path = self._cache_path("expert", payload, "bin")
        if not os.path.exists(path):
            starts, goals = self.test_queries(kind, seed)
            self.log(f"  expert reference {kind} seed={seed} ...")
            costs, ok = expert_reference(self.env, starts, goals, self.cfg.expert,
                                         seed, jobs=self.cfg.jobs)
            _save_arrays(path, {"costs": costs, "ok": ok})
        arrs = _load_arrays(path)
        return arrs["costs"], arrs["ok"]

    def run(self):
        cfg = self.cfg
        rows = []
        gamma, gamma_ci = estimate_nontriviality(
            InflatedView(self.env, self.padding), cfg.gamma_samples,
            np.random.default_rng([4242, cfg.gamma_samples]))
        self.log(f"environment {self.env.name}: nontriviality {gamma:.3f} +- {gamma_ci:.3f}"
                 f" at padding {self.padding}")
        for seed in cfg.seeds:
            self.log(f"seed {seed}:")
            models = {p: self.model(p, seed)[0] for p in cfg.presets}
            for kind in ("uniform", "nontrivial"):
                starts, goals = self.test_queries(kind, seed)
                costs, ok = self.expert_costs(kind, seed)
                for use_steer in cfg.steer_modes:
                    pcfg = PlannerConfig(
                        n_plan=cfg.planner.n_plan, resolution=cfg.planner.resolution,
                        use_steer=use_steer, delta=cfg.planner.delta,
                        replan_depth=cfg.planner.replan_depth,
                        replan_segment_cap=cfg.planner.replan_segment_cap)
                    for preset in cfg.presets:
                        row = evaluate(preset, models[preset], self.env, starts, goals,
                                       costs, ok, pcfg, kind, seed)
                        rows.append(row)
                        self.log(f"  steer={'on' if use_steer else 'off'} {kind:11s} "
                                 f"{preset:11s} success {row.success_ratio:.3f} "
                                 f"cost {row.cost_ratio:.3f}")
        report = {"env": self.env.name, "padding": self.padding,
                  "gamma": gamma, "gamma_ci": gamma_ci, "rows": rows}
        self._write_outputs(report)
        return report

    # --- report files ------------------------------------------------------

    def _aggregate(self, rows):
        agg = {}
        for row in rows:
            key = (row.use_steer, row.query_kind, row.model_id)
            agg.setdefault(key, []).append(row)
        return agg

    def _write_outputs(self, report):
        cfg = self.cfg
        rows = report["rows"]
        agg = self._aggregate(rows)

        # metrics.csv: per-seed rows then aggregates (no wall time here)
        lines = ["env,steer,query_kind,model,seed,success_ratio,cost_ratio,"
                 "n_success,n_total,n_expert_failed"]
        for r in rows:
            lines.append(f"{report['env']},{int(r.use_steer)},{r.query_kind},"
                         f"{r.model_id},{r.seed},{r.success_ratio:.6f},"
                         f"{r.cost_ratio:.6f},{r.n_success},{r.n_total},"
                         f"{r.n_expert_failed}")
        for (steer, kind, model), rs in sorted(agg.items()):
            sr = np.array([r.success_ratio for r in rs])
            cr = np.array([r.cost_ratio for r in rs])
            lines.append(f"{report['env']},{int(steer)},{kind},{model},mean,"
                         f"{sr.mean():.6f},{_nanmean(cr):.6f},,,")
            lines.append(f"{report['env']},{int(steer)},{kind},{model},std,"
                         f"{sr.std(ddof=1) if len(rs) > 1 else 0.0:.6f},"
                         f"{_nanstd(cr):.6f},,,")
        with open(os.path.join(cfg.out_dir, "metrics.csv"), "w") as fh:
            fh.write("\n".join(lines) + "\n")

        # timings.csv: wall-clock side channel, intentionally separate
        tlines = ["env,steer,query_kind,model,seed,mean_wall_time_s"]
        for r in rows:
            tlines.append(f"{report['env']},{int(r.use_steer)},{r.query_kind},"
                          f"{r.model_id},{r.seed},{r.mean_wall_time:.6f}")
        with open(os.path.join(cfg.out_dir, "timings.csv"), "w") as fh:
            fh.write("\n".join(tlines) + "\n")

        # report.txt: aligned tables in the classic layout
        out = [f"environment {report['env']}  "
               f"nontriviality {report['gamma']:.3f} +- {report['gamma_ci']:.3f} "
               f"(padding {report['padding']})",
               f"k_train {cfg.k_train}  k_test {cfg.k_test}  seeds {list(cfg.seeds)}",
               ""]
        for steer in cfg.steer_modes:
            out.append(f"steering {'enabled' if steer else 'disabled (proximity rule)'}")
            out.append(f"{'model':<12}{'uniform query':^28}{'non-trivial query':^28}")
            out.append(f"{'':<12}{'success ratio':>14}{'cost ratio':>14}"
                       f"{'success ratio':>14}{'cost ratio':>14}")
            for model in cfg.presets:
                cells = []
                for kind in ("uniform", "nontrivial"):
                    rs = agg.get((steer, kind, model), [])
                    sr = np.array([r.success_ratio for r in rs])
                    cr = np.array([r.cost_ratio for r in rs])
                    sstd = sr.std(ddof=1) if len(rs) > 1 else 0.0
                    cells.append(f"{sr.mean():.3f}±{sstd:.3f}")
                    cells.append(f"{_nanmean(cr):.3f}")
                out.append(f"{model:<12}{cells[0]:>14}{cells[1]:>14}{cells[2]:>14}{cells[3]:>14}")
            out.append("")
        out.append("cost ratio averaged over queries solved by both the neural planner")
        out.append("and the expert; std across seeds (single-run tables have none).")
        with open(os.path.join(cfg.out_dir, "report.txt"), "w") as fh:
            fh.write("\n".join(out) + "\n")

        self._write_figures()

    def _write_figures(self):
        cfg = self.cfg
        fig_dir = os.path.join(cfg.out_dir, "figures")
        os.makedirs(fig_dir, exist_ok=True)
        seed = cfg.seeds[0]
        view = InflatedView(self.env, 0.0)
        # scatter of non-trivial test queries
        starts, goals = self.test_queries("nontrivial", seed)
        svg = render_svg(self.env, queries=list(zip(starts, goals)), padding=self.padding)
        save_svg(svg, os.path.join(fig_dir, f"{self.env.name}_nontrivial_queries.svg"))
        # a few expert paths
        paths = []
        for i in range(min(5, starts.shape[0])):
            p = solve_query((starts[i], goals[i]), view, cfg.expert, seed=i)
            if p is not None:
                paths.append(p)
        svg = render_svg(self.env, paths=paths, padding=self.padding)
        save_svg(svg, os.path.join(fig_dir, f"{self.env.name}_expert_paths.svg"))


def run_grid(cfg: GridConfig, log=print):
    return GridRunner(cfg, log=log).run()
