"""Named experiment sweeps."""
from __future__ import annotations

from dataclasses import replace

from .experiment import ExperimentSpec

ALL_TOPOLOGIES = ("uniring", "biring", "torus", "hypercube", "complete")
P_GRID = tuple(round(0.05 * i, 2) for i in range(21))

PRESETS = {
    # running time against transmission probability, desk scale
    "fig1-desk": ExperimentSpec(functions=("onemax", "lo"), ns=(64,), topologies=ALL_TOPOLOGIES,
                                mus=(16,), ps=P_GRID, reps=100, base_seed=1),
    # efficiency against island count; torus sizes without a 3x3-or-larger layout are skipped
    "fig2-desk": ExperimentSpec(functions=("onemax", "lo"), ns=(64,), topologies=ALL_TOPOLOGIES,
                                mus=(1, 2, 4, 8, 16), ps=(0.1, 1.0), reps=100, base_seed=2),
    "fig1-paper": ExperimentSpec(functions=("onemax", "lo"), ns=(256,),
                                 topologies=("biring", "torus", "hypercube", "complete"), mus=(64,),
                                 ps=tuple(round(0.01 * i, 2) for i in range(101)), reps=100, base_seed=3),
}


def get(name: str, reps: int | None = None, seed: int | None = None) -> ExperimentSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    if reps is not None:
        spec = replace(spec, reps=reps)
    if seed is not None:
        spec = replace(spec, base_seed=seed)
    return spec
