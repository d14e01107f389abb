"""Command-line front end: ``aptemper run | bench | validate``."""
import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import bench as bench_mod
from .config import load_run_config, parse_grid
from .exceptions import AptemperError, ConfigError
from .sampler import resolve_target, run
from .validate import PROBES, run_probes

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VALIDATE, EXIT_INTERRUPTED = 0, 1, 2, 3, 130

logger = logging.getLogger("aptemper")


def _fmt(v):
    if isinstance(v, (int, bool, np.integer, np.bool_)):
        return str(int(v))
    v = float(v)
    return repr(v) if math.isfinite(v) else ("nan" if v != v else ("inf" if v > 0 else "-inf"))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_run_outputs(out_dir, trace, summary, config):
    os.makedirs(out_dir, exist_ok=True)
    d, L0 = trace.dim, trace.L0
    _write_csv(
        os.path.join(out_dir, "trace.csv"),
        ["iter", "level"] + [f"x_{k}" for k in range(d)] + ["energy"],
        ([it, lvl, *x, e] for it, lvl, x, e in trace.trace_rows),
    )
    _write_csv(os.path.join(out_dir, "swaps.csv"), ["iter", "i", "j", "alpha", "accepted"], trace.swap_rows)
    _write_csv(
        os.path.join(out_dir, "ladder.csv"),
        ["iter", "L"] + [f"T_{k}" for k in range(1, L0 + 1)],
        ([it, L, *temps, *([math.nan] * (L0 - len(temps)))] for it, L, temps in trace.ladder_rows),
    )
    doc = summary.to_json()
    doc["config_echo"] = config.echo()
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _load_target(config):
    try:
        return resolve_target(config)
    except ConfigError:
        raise
    except (AptemperError, OSError) as exc:
        raise ConfigError(str(exc), field="target") from None


def cmd_run(args):
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"run.threads={args.threads}")
    config, _ = load_run_config(args.config, overrides)
    trace, summary = run(config, target=_load_target(config))
    write_run_outputs(args.out, trace, summary, config)
    print(f"wrote {args.out}: final_L={summary.final_L} swap_acceptance={summary.swap_acc:.3f}")
    return EXIT_OK


def _bench_one(config):
    _, summary = run(config)
    return summary


def _bench_rows(cells, results, truth):
    rows = []
    for strategy, L in cells:
        done = results.get((strategy, L), [])
        if done:
            rows.append(bench_mod.group_report(strategy, L, done, truth))
    return rows


def _bench_meta(cells, results, runs, partial, config):
    groups = []
    for strategy, L in cells:
        done = results.get((strategy, L), [])
        counts = {}
        for s in done:
            counts[str(s.final_L)] = counts.get(str(s.final_L), 0) + 1
        groups.append({
            "strategy": strategy, "L": L, "completed_runs": len(done),
            "final_L_counts": counts,
            "swap_acc_per_run": [bench_mod._num(s.swap_acc) for s in done],
            "missing_modes_per_run": [s.missing_modes for s in done],
        })
    return {"partial": partial, "runs_requested": runs, "groups": groups, "config_echo": config.echo()}


def cmd_bench(args):
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"bench.base_seed={args.seed}")
    config, doc = load_run_config(args.config, overrides)
    bench_cfg = doc.get("bench") or {}
    runs = int(args.runs if args.runs is not None else bench_cfg.get("runs", 10))
    if runs < 1:
        raise ConfigError("must be >= 1", field="bench.runs")
    base_seed = int(bench_cfg.get("base_seed", config.seed))
    grid_spec = args.grid if args.grid is not None else bench_cfg.get("grid")
    cells = parse_grid(grid_spec) if grid_spec is not None else [(str(config.strategy), config.levels_initial)]
    config = replace(config, record="none")
    tasks = []
    for strategy, L in cells:
        for r in range(runs):
            cfg = replace(config, strategy=strategy, levels_initial=L, temps=None, seed=base_seed + r).validate()
            tasks.append(((strategy, L), cfg))
    target = _load_target(config)
    truth = bench_mod.moment_truth(target)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "bench.csv")
    json_path = os.path.join(args.out, "bench.json")
    results = {}

    def flush(partial):
        bench_mod.write_report(_bench_rows(cells, results, truth), csv_path, json_path,
                               _bench_meta(cells, results, runs, partial, config))

    workers = args.threads or 1
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [(key, pool.submit(_bench_one, replace(cfg, target=target))) for key, cfg in tasks]
                for key, fut in futures:
                    results.setdefault(key, []).append(fut.result())
                    flush(True)
        else:
            for key, cfg in tasks:
                results.setdefault(key, []).append(run(cfg, target=target)[1])
                flush(True)
    except KeyboardInterrupt:
        flush(True)
        print(f"interrupted; partial report over completed runs in {args.out}", file=sys.stderr)
        return EXIT_INTERRUPTED
    flush(False)
    print(f"wrote {csv_path} ({len(cells)} groups x {runs} runs)")
    return EXIT_OK


def cmd_validate(args):
    if args.list:
        for name in PROBES:
            print(name)
        return EXIT_OK
    if args.only:
        unknown = set(args.only) - set(PROBES)
        if unknown:
            raise ConfigError(f"unknown probe {sorted(unknown)[0]!r}", field="--only")
    ok = run_probes(args.only)
    return EXIT_OK if ok else EXIT_VALIDATE


def build_parser():
    parser = argparse.ArgumentParser(prog="aptemper", description="Adaptive parallel tempering")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML run/bench config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)

    p_run = sub.add_parser("run", help="run one sampler and write trace/summary files")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="repeated runs over a strategy x level-count grid")
    common(p_bench)
    p_bench.add_argument("--runs", type=int, help="runs per grid cell")
    p_bench.add_argument("--grid", help="e.g. ee,ra:3,5 (use ';' between rings:<...> strategies)")
    p_bench.set_defaults(func=cmd_bench)

    p_val = sub.add_parser("validate", help="run the fast invariant probes")
    p_val.add_argument("--list", action="store_true", help="print probe names only")
    p_val.add_argument("--only", action="append", metavar="NAME")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AptemperError, ArithmeticError, ValueError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
