"""Synchronous probabilistic information propagation over a topology.

Each round, every vertex informed before the round tries every out-edge to a
still-uninformed vertex and succeeds independently with probability ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import rng as _rng
from .topology import TopologyGraph

DEFAULT_ROUNDS = 10_000_000
UNATTAINED = -1


@dataclass(frozen=True)
class PropagationState:
    informed: frozenset[int]
    round: int = 0


@dataclass(frozen=True)
class HittingTimes:
    """``T[k - 1]`` is the first round with at least ``k`` informed vertices, -1 if never."""

    T: np.ndarray

    @property
    def mu(self) -> int:
        return len(self.T)

    def __getitem__(self, k: int) -> int:
        if not 1 <= k <= self.mu:
            raise IndexError(f"k must lie in 1..{self.mu}")
        return int(self.T[k - 1])

    @property
    def complete(self) -> bool:
        return bool(self.T[-1] >= 0)

    @property
    def propagation_time(self) -> int:
        return int(self.T[-1])


def propagate_step(state: PropagationState, g: TopologyGraph, p: float,
                   stream: _rng.Stream) -> PropagationState:
    if not state.informed:
        raise ValueError("at least one vertex must be informed")
    rnd = state.round + 1
    informed_round = [-1] * g.num_vertices
    for v in state.informed:
        informed_round[v] = 0
    ptr, idx = g.csr
    newly = _kernels._pykernel.propagate_round(informed_round, rnd, ptr, idx, p, stream)
    return PropagationState(state.informed | frozenset(newly), rnd)


def make_stream(g: TopologyGraph, source: int, seed: int) -> _rng.Stream:
    """The stream a seeded propagation run from ``source`` draws from."""
    return _rng.Stream.from_seed(seed, g.num_vertices, _rng.text_key(g.label),
                                 _rng.TAG_PROPAGATE, source)


def run_many(g: TopologyGraph, p: float, seeds, source: int = 0, budget: int = DEFAULT_ROUNDS,
             backend: str | None = None) -> np.ndarray:
    """Hitting-time matrix, one row per seed (columns k = 1..mu)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"transmission probability must lie in [0, 1], got {p}")
    if not 0 <= source < g.num_vertices:
        raise IndexError(f"source {source} out of range")
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    states = np.ascontiguousarray(_rng.stream_states_many(
        seeds, g.num_vertices, _rng.text_key(g.label), _rng.TAG_PROPAGATE, source))
    ptr, idx = g.csr
    return np.asarray(_kernels.get(backend).hitting_times(ptr, idx, float(p), source, budget,
                                                           states))


def run_hitting_times(g: TopologyGraph, p: float, source: int = 0,
                      budget: int = DEFAULT_ROUNDS, seed: int = 0,
                      backend: str | None = None) -> HittingTimes:
    return HittingTimes(run_many(g, p, [seed], source, budget, backend)[0])
