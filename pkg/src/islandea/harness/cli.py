"""Command-line entry point: ``islandea <command> [flags]``.

Exit codes: 0 on success, 1 on usage or configuration errors, 2 when
``audit`` finds a point whose empirical mean exceeds its bound.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import yaml

from .. import bounds, objective, oracle, propagation, rng, topology
from ..island_model import DEFAULT_BUDGET, ModelConfig, run_batch
from . import csvio, presets
from .experiment import ExperimentSpec, RunRecord, any_violation, audit_bounds, run_experiment, summarize
from .stats import moments

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2

DEFAULTS = {"function": "onemax", "n": 32, "mu": 4, "topology": "complete", "p": 1.0, "tau": 1,
            "reps": 100, "seed": 0, "budget": DEFAULT_BUDGET, "out": None, "fixed_start": None}
SWEEP_KEYS = ("function", "n", "mu", "topology", "p", "tau")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_point_flags(sp, many: bool):
    nargs = "+" if many else None
    sp.add_argument("--function", nargs=nargs, help="onemax | lo | jump:k")
    sp.add_argument("--n", type=int, nargs=nargs)
    sp.add_argument("--mu", type=int, nargs=nargs)
    sp.add_argument("--topology", nargs=nargs, help="uniring | biring | torus[:WxH] | hypercube | complete")
    sp.add_argument("--p", type=float, nargs=nargs)
    sp.add_argument("--tau", type=int, nargs=nargs)
    sp.add_argument("--config", type=Path, help="YAML file of flag values; flags override it")


def _add_run_flags(sp):
    sp.add_argument("--reps", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out", type=Path)
    sp.add_argument("--fixed-start", dest="fixed_start")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="islandea", description="Island-model (1+1) EA experiments and runtime bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("run", help="replicate one configuration, write per-run CSV")
    _add_point_flags(sp, many=False)
    _add_run_flags(sp)

    sp = sub.add_parser("sweep", help="replicate every combination of the given axis values")
    _add_point_flags(sp, many=True)
    _add_run_flags(sp)

    sp = sub.add_parser("audit", help="compare mean running times with the bounds; exit 2 on violation")
    _add_point_flags(sp, many=True)
    _add_run_flags(sp)
    sp.add_argument("--runs", type=Path, help="audit an existing per-run CSV instead of simulating")

    sp = sub.add_parser("bounds", help="table of every applicable bound")
    _add_point_flags(sp, many=False)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("propagate", help="hitting times of probabilistic information spreading")
    _add_point_flags(sp, many=False)
    _add_run_flags(sp)
    sp.add_argument("--source", type=int, default=0)

    sp = sub.add_parser("oracle", help="exact expected t_par next to a Monte Carlo estimate")
    _add_point_flags(sp, many=False)
    _add_run_flags(sp)

    sp = sub.add_parser("preset", help="run a named sweep")
    sp.add_argument("name", choices=sorted(presets.PRESETS))
    sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sp.add_argument("--reps", type=int)
    sp.add_argument("--seed", type=int)
    return parser


def load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a key/value document")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"{path}: unknown keys {', '.join(sorted(unknown))}")
    return data


def settings(args) -> dict:
    """Flag values over config-file values over defaults."""
    merged = dict(DEFAULTS)
    merged.update(load_config(getattr(args, "config", None)))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _scalar(s: dict, key: str):
    v = s[key]
    if isinstance(v, (list, tuple)):
        if len(v) != 1:
            raise UsageError(f"--{key.replace('_', '-')} takes a single value for this command")
        return v[0]
    return v


def _axis(s: dict, key: str) -> tuple:
    v = s[key]
    return tuple(v) if isinstance(v, (list, tuple)) else (v,)


def _config(s: dict) -> ModelConfig:
    n, mu = int(_scalar(s, "n")), int(_scalar(s, "mu"))
    return ModelConfig(objective.parse(str(_scalar(s, "function")), n),
                       topology.parse(str(_scalar(s, "topology")), mu), float(_scalar(s, "p")),
                       tau=int(_scalar(s, "tau")), seed=int(s["seed"]), budget=int(s["budget"]))


def _spec(s: dict) -> ExperimentSpec:
    return ExperimentSpec(functions=tuple(str(f) for f in _axis(s, "function")),
                          ns=tuple(int(v) for v in _axis(s, "n")),
                          topologies=tuple(str(t) for t in _axis(s, "topology")),
                          mus=tuple(int(v) for v in _axis(s, "mu")),
                          ps=tuple(float(v) for v in _axis(s, "p")),
                          taus=tuple(int(v) for v in _axis(s, "tau")),
                          reps=int(s["reps"]), base_seed=int(s["seed"]), budget=int(s["budget"]),
                          fixed_start=s["fixed_start"])


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}.{suffix}.csv")


def _emit(out: Path | None, writer, rows):
    if out is None:
        writer(sys.stdout, rows)
    else:
        writer(out, rows)


def cmd_run(args) -> int:
    s = settings(args)
    _config(s)
    spec = _spec({k: ([_scalar(s, k)] if k in SWEEP_KEYS else v) for k, v in s.items()})
    result = run_experiment(spec)
    _emit(s["out"], csvio.write_runs, list(result.records()))
    row = result.summaries[0]
    print(f"mean t_par {row.t_par.mean:.6g} +/- {row.t_par.ci95:.3g} (95%), success {row.success_rate:.3g}",
          file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = settings(args)
    result = run_experiment(_spec(s))
    for point, reason in result.skipped:
        print(f"skipped {point}: {reason}", file=sys.stderr)
    out = s["out"]
    if out is None:
        csvio.write_summary(sys.stdout, result.summaries)
        return EXIT_OK
    csvio.write_runs(out, result.records())
    csvio.write_summary(_sibling(out, "summary"), result.summaries)
    csvio.write_long(_sibling(out, "long"), result.summaries)
    return EXIT_OK


def read_runs(path: Path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != csvio.RUN_COLUMNS:
            raise UsageError(f"{path}: not a per-run CSV")
        types = {"function": str, "topology": str, "topo_params": str, "p": float}
        return [RunRecord(**{k: types.get(k, int)(v) for k, v in row.items()}) for row in reader]


AUDIT_COLUMNS = csvio.POINT_COLUMNS + ["reps", "t_par_mean", "t_par_ci99", "bound", "bound_source", "violation"]


def cmd_audit(args) -> int:
    if args.runs is not None:
        summary = audit_bounds(summarize(read_runs(args.runs)))
    else:
        summary = run_experiment(_spec(settings(args))).summaries
    rows = ([getattr(r, c) for c in csvio.POINT_COLUMNS]
            + [r.reps, r.t_par.mean, r.t_par.ci99, r.bound, r.bound_source, r.violation] for r in summary)
    _emit(args.out, lambda t, rs: csvio.write_table(t, AUDIT_COLUMNS, rs), rows)
    return EXIT_VIOLATION if any_violation(summary) else EXIT_OK


def cmd_bounds(args) -> int:
    s = settings(args)
    n, mu, p = int(_scalar(s, "n")), int(_scalar(s, "mu")), float(_scalar(s, "p"))
    obj = objective.parse(str(_scalar(s, "function")), n)
    spelling = str(_scalar(s, "topology"))
    kind = spelling.partition(":")[0]
    try:
        g = topology.parse(spelling, mu)
        diam = topology.diameter(g)
    except topology.TopologyError:
        diam = None
    part = objective.canonical_partition(obj)
    rows = ([r.source.value, r.value, r.log_base, json.dumps(r.inputs, sort_keys=True)]
            for r in bounds.all_bounds(part, mu, p, kind, diam))
    _emit(args.out, lambda t, rs: csvio.write_table(t, ["source", "value", "log_base", "inputs"], rs), rows)
    return EXIT_OK


def cmd_propagate(args) -> int:
    s = settings(args)
    g = topology.parse(str(_scalar(s, "topology")), int(_scalar(s, "mu")))
    p, reps = float(_scalar(s, "p")), int(s["reps"])
    seeds = rng.derive_seeds(int(s["seed"]), rng.TAG_REPLICATE, count=reps)
    T = propagation.run_many(g, p, seeds, args.source, int(s["budget"]))
    rows = ([g.kind.value, g.params_label, p, r, int(seeds[r]), k + 1, int(T[r, k])]
            for r in range(reps) for k in range(g.num_vertices))
    header = ["topology", "topo_params", "p", "rep", "seed", "k", "t_k"]
    _emit(s["out"], lambda t, rs: csvio.write_table(t, header, rs), rows)
    full = T[:, -1]
    done = full[full >= 0]
    if len(done):
        m = moments(done)
        print(f"mean propagation time {m.mean:.6g} +/- {m.ci99:.3g} (99%) over {len(done)} complete runs",
              file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    s = settings(args)
    cfg = _config(s)
    exact = oracle.expected_t_par(cfg, s["fixed_start"])
    reps = int(s["reps"])
    seeds = rng.derive_seeds(int(s["seed"]), rng.TAG_REPLICATE, count=reps)
    m = moments(run_batch(cfg, seeds, s["fixed_start"]).t_par)
    header = ["exact", "mc_mean", "mc_ci99", "reps"]
    csvio.write_table(sys.stdout if s["out"] is None else s["out"], header,
                      [[exact, m.mean, m.ci99, reps]])
    return EXIT_OK


def cmd_preset(args) -> int:
    spec = presets.get(args.name, args.reps, args.seed)
    os.makedirs(args.out, exist_ok=True)
    result = run_experiment(spec)
    base = Path(args.out) / args.name
    csvio.write_runs(base.with_suffix(".runs.csv"), result.records())
    csvio.write_summary(base.with_suffix(".summary.csv"), result.summaries)
    csvio.write_long(base.with_suffix(".long.csv"), result.summaries)
    print(f"{len(result.points)} points written to {args.out}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "audit": cmd_audit, "bounds": cmd_bounds,
            "propagate": cmd_propagate, "oracle": cmd_oracle, "preset": cmd_preset}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, LookupError, OSError, yaml.YAMLError, oracle.OracleError) as exc:
        print(f"islandea: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
