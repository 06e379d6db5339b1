"""Command line front end: ``simulate``, ``design-h``, ``verify``, ``sweep``.

Exit codes: 0 success, 1 property failure (verify), 2 configuration error,
3 integration abort.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import report, verify
from .config import ConfigError, ExperimentConfig, load_config, preset_names, read_json
from .sim import IntegrationError, run
from .spectral import design_constant_H

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def simulate(cfg: ExperimentConfig):
    """Run one configured experiment and return ``(trajectory, summary)``."""
    v0 = cfg.initial_state()
    spec = cfg.vector_field(v0)
    traj = run(spec, v0, cfg.integrator, cfg.tol)
    return traj, report.summarize(traj, cfg.to_dict())


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config, args.outdir)
        v0 = cfg.initial_state()
        spec = cfg.vector_field(v0)
    except ConfigError as exc:
        _err(exc)
        return EXIT_CONFIG
    try:
        traj = run(spec, v0, cfg.integrator, cfg.tol)
    except IntegrationError as exc:
        _err(exc)
        return EXIT_ABORT
    summary = report.summarize(traj, cfg.to_dict())
    csv_path = cfg.outputs.get("trajectory_csv")
    json_path = cfg.outputs.get("summary_json")
    if csv_path:
        report.write_trajectory_csv(traj, csv_path)
    if json_path:
        Path(json_path).write_text(report.dumps(summary) + "\n")
    if not json_path:
        print(report.dumps(summary))
    else:
        print(f"{summary['classification']} -> {json_path}")
    return EXIT_OK


def cmd_design_h(args) -> int:
    try:
        cfg = load_config(args.config)
        v0 = cfg.initial_state()
    except ConfigError as exc:
        _err(exc)
        return EXIT_CONFIG
    design = design_constant_H(v0, args.target)
    if design:
        out = {"status": "feasible", "target": args.target, "H": design.H, "q": design.q,
               "partition": report.partition_dict(design.partition)}
    else:
        out = {"status": "infeasible", "target": args.target, "reason": design.reason}
    print(report.dumps(out))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify.run_suites(args.suite, args.trials, args.seed)
    print(f"verify suite={args.suite} trials={args.trials} seed={args.seed}")
    print(verify.format_table(checks))
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"FAILED {c.suite}: {c.name}; reproduce with seed={args.seed}, witness:")
        print(report.dumps(c.witness))
    print("ALL PASS" if not failed else f"{len(failed)} CHECK(S) FAILED")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------- sweep

SWEEP_COLUMNS = ["num_agents", "dim", "seed", "status", "classification", "group1_size", "group2_size",
                 "t_dissensus", "t_consensus", "final_gram_min", "final_gram_max"]


def parse_sweep(raw) -> tuple[list[dict], dict]:
    """Expand a grid config into per-cell experiment dicts."""
    if not isinstance(raw, dict):
        raise ConfigError("sweep config must be a JSON object")
    for key in ("num_agents", "dim", "dynamics", "outputs"):
        if key not in raw:
            raise ConfigError(f"missing sweep key {key!r}")
    ns, ds = raw["num_agents"], raw["dim"]
    if "seeds" in raw:
        seeds = raw["seeds"]
    else:
        seeds = list(range(raw.get("seed_start", 0), raw.get("seed_start", 0) + raw.get("seed_count", 0)))
    if not all(isinstance(x, list) for x in (ns, ds, seeds)):
        raise ConfigError("num_agents, dim and seeds must be lists")
    pairing = raw.get("pairing", "product")
    if pairing == "product":
        cells = [(n, d, s) for n in ns for d in ds for s in seeds]
    elif pairing == "cycle":
        # seed k uses num_agents[k mod len] and dim[k mod len]
        cells = [(ns[k % len(ns)], ds[k % len(ds)], s) for k, s in enumerate(seeds)] if ns and ds else []
    else:
        raise ConfigError(f"pairing must be 'product' or 'cycle', got {pairing!r}")
    if not cells:
        raise ConfigError("sweep grid is empty")
    outputs = raw["outputs"]
    if not isinstance(outputs, dict) or not outputs.get("sweep_csv"):
        raise ConfigError("outputs.sweep_csv is required")
    base = {k: raw[k] for k in ("dynamics", "integrator", "tol") if k in raw}
    base["init"] = raw.get("init", {"kind": "random_uniform"})
    exps = []
    for n, d, s in cells:
        exp = dict(base, seed=s, num_agents=n, dim=d)
        ExperimentConfig.from_dict(exp)  # validate every cell up front
        exps.append(exp)
    return exps, outputs


def run_cell(exp: dict) -> dict:
    row = {"num_agents": exp["num_agents"], "dim": exp["dim"], "seed": exp["seed"]}
    try:
        _, summary = simulate(ExperimentConfig.from_dict(exp))
    except (ConfigError, IntegrationError) as exc:
        row["status"] = f"error: {exc}"
        return row
    sizes = summary["partition_sizes"] or [None, None]
    row.update(status="ok", classification=summary["classification"], group1_size=sizes[0],
               group2_size=sizes[1], t_dissensus=summary["t_dissensus"], t_consensus=summary["t_consensus"],
               final_gram_min=summary["final_gram_min"], final_gram_max=summary["final_gram_max"])
    return row


def _cell_text(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return report.fmt(x)
    return str(x)


def aggregate(rows: list[dict]) -> list[dict]:
    groups = {}
    for r in rows:
        groups.setdefault((r["num_agents"], r["dim"]), []).append(r)
    out = []
    for (n, d), rs in sorted(groups.items()):
        total = len(rs)
        dis = [r for r in rs if r.get("classification") == "dissensus"]
        con = [r for r in rs if r.get("classification") == "consensus"]
        tdis = [r["t_dissensus"] for r in dis if r.get("t_dissensus") is not None]
        out.append({"num_agents": n, "dim": d, "runs": total,
                    "dissensus_rate": len(dis) / total, "consensus_rate": len(con) / total,
                    "failed": sum(1 for r in rs if r.get("status") != "ok"),
                    "mean_t_dissensus": float(np.mean(tdis)) if tdis else None})
    return out


def sweep(raw: dict, workers: int = 1) -> tuple[list[dict], list[dict]]:
    exps, _ = parse_sweep(raw)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, exps))
    else:
        rows = [run_cell(e) for e in exps]
    return rows, aggregate(rows)


def cmd_sweep(args) -> int:
    try:
        raw = read_json(args.config)
        exps, outputs = parse_sweep(raw)
        for key in ("sweep_csv", "aggregate_csv"):
            if outputs.get(key):
                parent = Path(outputs[key]).expanduser().resolve().parent
                if not parent.is_dir():
                    raise ConfigError(f"output directory {str(parent)!r} does not exist")
    except ConfigError as exc:
        _err(exc)
        return EXIT_CONFIG
    workers = args.workers if args.workers is not None else int(raw.get("workers", 1))
    rows, agg = sweep(raw, workers)
    with open(outputs["sweep_csv"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_cell_text(r.get(c)) for c in SWEEP_COLUMNS])
    agg_cols = ["num_agents", "dim", "runs", "dissensus_rate", "consensus_rate", "failed", "mean_t_dissensus"]
    if outputs.get("aggregate_csv"):
        with open(outputs["aggregate_csv"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(agg_cols)
            for r in agg:
                w.writerow([_cell_text(r[c]) for c in agg_cols])
    total = len(rows)
    dis = sum(r.get("classification") == "dissensus" for r in rows)
    con = sum(r.get("classification") == "consensus" for r in rows)
    print(f"cells={total} dissensus_rate={dis / total:.4f} consensus_rate={con / total:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ojaflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configured experiment")
    p.add_argument("config", help=f"config path or preset name ({', '.join(preset_names())})")
    p.add_argument("--outdir", help="write outputs into this directory instead of the configured paths")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("design-h", help="design a constant H for consensus or dissensus")
    p.add_argument("config")
    p.add_argument("--target", choices=("consensus", "dissensus"), required=True)
    p.set_defaults(func=cmd_design_h)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a grid of experiments")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
