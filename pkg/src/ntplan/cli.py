"""Command-line interface.

Subcommands cover the whole pipeline: emit bundled environments, estimate
environment difficulty, generate datasets, train models, evaluate a model,
run the full experiment grid, and plot environments.  Every run writes a
manifest JSON next to its outputs with the resolved configuration, seeds
and content hashes, so results are reproducible from the manifest alone.
"""

import argparse
import hashlib
import json
import os
import sys

import numpy as np
import yaml

from . import __version__
from .bench import GridConfig, evaluate, expert_reference, make_test_queries, run_grid
from .collision import InflatedView
from .datagen import DatasetConfig, dataset_to_text, generate_dataset, load_dataset, save_dataset
from .envs import bundled, bundled_environments, default_padding
from .expert import ExpertConfig, solve_query
from .geometry import Environment, InvalidEnvironment, load_environment, save_environment
from .mlp import TrainConfig, load_model, save_model, train
from .planner import PlannerConfig
from .sampling import SamplerConfig, estimate_nontriviality

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(base_path, subcommand, config, seeds, inputs, outputs):
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "config": config,
        "seeds": seeds,
        "inputs": {p: _sha256(p) for p in inputs if os.path.exists(p)},
        "outputs": {p: _sha256(p) for p in outputs if os.path.exists(p)},
    }
    path = f"{base_path}.manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"manifest: {path}")
    return path


def _load_env(spec: str) -> Environment:
    if os.path.exists(spec):
        return load_environment(spec)
    try:
        return bundled(spec)
    except KeyError:
        raise InvalidEnvironment(
            f"'{spec}' is neither an environment file nor a bundled name") from None


def _env_padding(env, value):
    return default_padding(env) if value is None else value


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen_env(args):
    os.makedirs(args.out_dir, exist_ok=True)
    envs = bundled_environments()
    names = [args.name] if args.name else sorted(envs)
    outputs = []
    for name in names:
        if name not in envs:
            print(f"error: unknown bundled environment '{name}'", file=sys.stderr)
            return EXIT_USAGE
        path = os.path.join(args.out_dir, f"{name}.env")
        save_environment(envs[name], path)
        outputs.append(path)
        print(f"wrote {path}")
    _write_manifest(os.path.join(args.out_dir, "environments"), "gen-env",
                    {"names": names}, [], [], outputs)
    return EXIT_OK


def cmd_gamma(args):
    env = _load_env(args.env)
    padding = _env_padding(env, args.padding)
    view = InflatedView(env, padding)
    gamma, ci = estimate_nontriviality(view, args.n, args.seed, args.resolution)
    print(f"environment {env.name}  padding {padding}")
    print(f"nontriviality: {gamma:.4f} +- {ci:.4f} (95% CI, n={args.n})")
    base = args.out or f"gamma_{env.name}"
    with open(f"{base}.json", "w") as fh:
        json.dump({"env": env.name, "padding": padding, "n": args.n,
                   "seed": args.seed, "gamma": gamma, "ci95": ci},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(base, "gamma",
                    {"env": args.env, "padding": padding, "n": args.n,
                     "resolution": args.resolution},
                    [args.seed], [args.env] if os.path.exists(args.env) else [],
                    [f"{base}.json"])
    return EXIT_OK


def cmd_gen_data(args):
    env = _load_env(args.env)
    padding = _env_padding(env, args.padding)
    expert = ExpertConfig(cell_size=args.cell_size, max_iters=args.max_iters,
                          step_size=args.step_size, smooth_rounds=args.smooth_rounds)
    cfg = DatasetConfig(p_nontrivial=args.p_nt, prune=args.prune,
                        k_train=args.k_train, padding=padding, expert=expert,
                        sampler=SamplerConfig(n_max=args.n_max), seed=args.seed)
    ds = generate_dataset(env, cfg, jobs=args.jobs)
    save_dataset(ds, args.out)
    if args.text:
        with open(f"{args.out}.csv", "w") as fh:
            fh.write(dataset_to_text(ds))
    meta = ds.metadata
    print(f"dataset: {args.out}")
    print(f"  queries {ds.n_queries}  samples {ds.n_samples}")
    print(f"  nontriviality {meta['nontriviality']:.3f} +- {meta['nontriviality_ci95']:.3f}")
    print(f"  expert failures {meta['expert_failures']}  fallbacks {meta['fallbacks']}")
    outputs = [args.out, f"{args.out}.meta.json"]
    if args.text:
        outputs.append(f"{args.out}.csv")
    _write_manifest(args.out, "gen-data", meta["config"], [args.seed],
                    [args.env] if os.path.exists(args.env) else [], outputs)
    return EXIT_OK


def cmd_train(args):
    ds = load_dataset(args.data)
    cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
                      val_split=args.val_split, hidden=tuple(args.hidden), seed=args.seed)
    model, report = train(ds, cfg)
    save_model(model, args.out)
    print(f"model: {args.out}")
    print(f"  train loss {report['train_loss'][0]:.6f} -> {report['final_train_loss']:.6f} "
          f"over {cfg.epochs} epochs ({report['n_train']} train / {report['n_val']} val)")
    with open(f"{args.out}.report.json", "w") as fh:
        json.dump(report, fh, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, "train",
                    {"data": args.data, "epochs": args.epochs, "lr": args.lr,
                     "batch_size": args.batch_size, "val_split": args.val_split,
                     "hidden": list(args.hidden)},
                    [args.seed], [args.data], [args.out, f"{args.out}.report.json"])
    return EXIT_OK


def cmd_eval(args):
    env = _load_env(args.env)
    model = load_model(args.model)
    sampler = SamplerConfig(n_max=args.n_max)
    starts, goals = make_test_queries(env, args.kind, args.k_test, args.seed, sampler)
    expert = ExpertConfig(max_iters=args.max_iters, cell_size=args.cell_size,
                          step_size=args.step_size)
    costs, ok = expert_reference(env, starts, goals, expert, args.seed)
    pcfg = PlannerConfig(n_plan=args.n_plan, use_steer=not args.no_steer,
                         delta=args.delta)
    row = evaluate(os.path.basename(args.model), model, env, starts, goals,
                   costs, ok, pcfg, args.kind, args.seed)
    print(f"environment {env.name}  kind {args.kind}  steer "
          f"{'off' if args.no_steer else 'on'}")
    print(f"success ratio {row.success_ratio:.3f} ({row.n_success}/{row.n_total})")
    print(f"cost ratio    {row.cost_ratio:.3f} (expert failures {row.n_expert_failed})")
    base = args.out or f"eval_{env.name}"
    with open(f"{base}.json", "w") as fh:
        json.dump({"env": env.name, "kind": args.kind, "use_steer": not args.no_steer,
                   "seed": args.seed, "success_ratio": row.success_ratio,
                   "cost_ratio": row.cost_ratio, "n_success": row.n_success,
                   "n_total": row.n_total, "n_expert_failed": row.n_expert_failed},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(base, "eval",
                    {"env": args.env, "model": args.model, "kind": args.kind,
                     "k_test": args.k_test, "no_steer": args.no_steer,
                     "delta": args.delta, "n_plan": args.n_plan},
                    [args.seed], [args.model], [f"{base}.json"])
    return EXIT_OK


def _grid_config_from_file(path) -> GridConfig:
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    kwargs = {}
    for key in ("env", "k_train", "k_test", "padding", "gamma_samples", "out_dir",
                "cache_dir", "jobs"):
        if key in doc:
            kwargs[key] = doc[key]
    if "seeds" in doc:
        kwargs["seeds"] = tuple(doc["seeds"])
    if "presets" in doc:
        kwargs["presets"] = tuple(doc["presets"])
    if "steer_modes" in doc:
        kwargs["steer_modes"] = tuple(bool(v) for v in doc["steer_modes"])
    if "expert" in doc:
        kwargs["expert"] = ExpertConfig(**doc["expert"])
    if "train" in doc:
        tr = dict(doc["train"])
        if "hidden" in tr:
            tr["hidden"] = tuple(tr["hidden"])
        kwargs["train"] = TrainConfig(**tr)
    if "planner" in doc:
        kwargs["planner"] = PlannerConfig(**doc["planner"])
    if "sampler" in doc:
        kwargs["sampler"] = SamplerConfig(**doc["sampler"])
    return GridConfig(**kwargs)


def cmd_grid(args):
    import dataclasses
    cfg = _grid_config_from_file(args.config)
    if args.out_dir:
        cfg = dataclasses.replace(cfg, out_dir=args.out_dir)
    if args.jobs:
        cfg = dataclasses.replace(cfg, jobs=args.jobs)
    report = run_grid(cfg, log=print if not args.quiet else None)
    outputs = [os.path.join(cfg.out_dir, "report.txt"),
               os.path.join(cfg.out_dir, "metrics.csv")]
    _write_manifest(os.path.join(cfg.out_dir, "grid"), "grid",
                    {"config_file": args.config}, list(cfg.seeds),
                    [args.config], outputs)
    print(f"report: {outputs[0]}")
    return EXIT_OK


def cmd_plot(args):
    from .render import render_svg, save_svg
    from .sampling import non_trivial_query, uniform_query

    env = _load_env(args.env)
    padding = _env_padding(env, args.padding)
    view = InflatedView(env, 0.0)
    rng = np.random.default_rng(args.seed)
    queries = []
    sampler = SamplerConfig(n_max=100)
    for _ in range(args.queries):
        if args.kind == "nontrivial":
            q, flag = non_trivial_query(view, sampler, rng)
            if not flag:
                continue
        else:
            q = uniform_query(view, rng)
        queries.append((q.start, q.goal))
    paths = []
    for s, g in queries[:args.paths]:
        p = solve_query((s, g), view, ExpertConfig(), seed=args.seed)
        if p is not None:
            paths.append(p)
    out = args.out or f"{env.name}.svg"
    save_svg(render_svg(env, paths=paths, queries=queries, padding=padding), out)
    print(f"figure: {out}")
    _write_manifest(out, "plot",
                    {"env": args.env, "kind": args.kind, "queries": args.queries,
                     "paths": args.paths, "padding": padding},
                    [args.seed], [], [out])
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="ntplan",
        description="Non-trivial query sampling pipeline for learned next-state planners")
    p.add_argument("--version", action="version", version=f"ntplan {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("gen-env", help="write bundled environment files")
    q.add_argument("--out-dir", default="environments")
    q.add_argument("--name", help="emit a single environment instead of all")
    q.set_defaults(fn=cmd_gen_env)

    q = sub.add_parser("gamma", help="estimate the non-triviality ratio")
    q.add_argument("--env", required=True, help="environment file or bundled name")
    q.add_argument("--n", type=int, default=100000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--padding", type=float, default=None,
                   help="obstacle padding (default: family data-gen padding)")
    q.add_argument("--resolution", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_gamma)

    q = sub.add_parser("gen-data", help="generate an expert dataset")
    q.add_argument("--env", required=True)
    q.add_argument("--p-nt", type=float, default=0.0,
                   help="probability of non-trivial query sampling")
    q.add_argument("--prune", action=argparse.BooleanOptionalAction, default=False)
    q.add_argument("--k-train", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.add_argument("--padding", type=float, default=None)
    q.add_argument("--n-max", type=int, default=100)
    q.add_argument("--cell-size", type=float, default=0.25)
    q.add_argument("--max-iters", type=int, default=2000)
    q.add_argument("--step-size", type=float, default=1.0)
    q.add_argument("--smooth-rounds", type=int, default=80)
    q.add_argument("--text", action="store_true", help="also export delimited text")
    q.add_argument("--jobs", type=int, default=1,
                   help="worker processes (results are identical for any value)")
    q.set_defaults(fn=cmd_gen_data)

    q = sub.add_parser("train", help="train a next-state model on a dataset")
    q.add_argument("--data", required=True)
    q.add_argument("--epochs", type=int, default=150)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.add_argument("--lr", type=float, default=1e-3)
    q.add_argument("--batch-size", type=int, default=64)
    q.add_argument("--val-split", type=float, default=0.1)
    q.add_argument("--hidden", type=int, nargs="+", default=[256, 256, 256, 256])
    q.set_defaults(fn=cmd_train)

    q = sub.add_parser("eval", help="evaluate a trained model on test queries")
    q.add_argument("--env", required=True)
    q.add_argument("--model", required=True)
    q.add_argument("--kind", choices=("uniform", "nontrivial"), default="uniform")
    q.add_argument("--k-test", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--no-steer", action="store_true")
    q.add_argument("--delta", type=float, default=1.0)
    q.add_argument("--n-plan", type=int, default=80)
    q.add_argument("--n-max", type=int, default=100)
    q.add_argument("--cell-size", type=float, default=0.25)
    q.add_argument("--max-iters", type=int, default=2000)
    q.add_argument("--step-size", type=float, default=1.0)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_eval)

    q = sub.add_parser("grid", help="run a full experiment grid from a config file")
    q.add_argument("--config", required=True)
    q.add_argument("--out-dir", default=None)
    q.add_argument("--jobs", type=int, default=None,
                   help="worker processes (results are identical for any value)")
    q.add_argument("--quiet", action="store_true")
    q.set_defaults(fn=cmd_grid)

    q = sub.add_parser("plot", help="render an environment with query overlays")
    q.add_argument("--env", required=True)
    q.add_argument("--kind", choices=("uniform", "nontrivial"), default="nontrivial")
    q.add_argument("--queries", type=int, default=60)
    q.add_argument("--paths", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--padding", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_plot)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except InvalidEnvironment as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
