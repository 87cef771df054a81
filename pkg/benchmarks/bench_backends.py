#!/usr/bin/env python3
"""Time the compiled and pure-Python kernels on identical workloads and check they agree."""
from __future__ import annotations

import argparse
import time

import numpy as np

from islandea import _kernels, objective, propagation, topology
from islandea.island_model import ModelConfig, run_batch

WORKLOADS = [
    ("onemax n=64 complete mu=16 p=0.1", lambda: ModelConfig(objective.onemax(64), topology.complete(16), 0.1)),
    ("lo n=32 biring mu=8 p=0.5", lambda: ModelConfig(objective.leading_ones(32), topology.bi_ring(8), 0.5)),
    ("jump:2 n=16 torus 3x3 p=1", lambda: ModelConfig(objective.jump(16, 2), topology.torus(3, 3), 1.0)),
]


def timed(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=20, help="replications per workload")
    ap.add_argument("--repeat", type=int, default=3, help="timing repeats (best is kept)")
    args = ap.parse_args(argv)

    if "cython" not in _kernels.BACKENDS:
        raise SystemExit("compiled kernel not built; run `pip install --no-build-isolation -e .` first")

    seeds = np.arange(args.reps, dtype=np.uint64)
    print(f"{'workload':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  same")
    for name, make in WORKLOADS:
        cfg = make()
        tp, rp = timed(lambda: run_batch(cfg, seeds, backend="python"), args.repeat)
        tc, rc = timed(lambda: run_batch(cfg, seeds, backend="cython"), args.repeat)
        same = np.array_equal(rp.t_par, rc.t_par) and np.array_equal(rp.t_com, rc.t_com)
        print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}  {same}")

    g = topology.bi_ring(64)
    tp, hp = timed(lambda: propagation.run_many(g, 1 / 64, seeds, backend="python"), args.repeat)
    tc, hc = timed(lambda: propagation.run_many(g, 1 / 64, seeds, backend="cython"), args.repeat)
    print(f"{'propagation biring mu=64 p=1/64':40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}  "
          f"{np.array_equal(hp, hc)}")


if __name__ == "__main__":
    main()
