"""Parallel (1+1) EA: mu islands with probabilistic migration over a topology."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from . import rng as _rng
from .objective import Objective, as_bits, evaluate
from .objective import LengthMismatch
from .topology import TopologyGraph


class ConfigError(ValueError):
    pass


DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class ModelConfig:
    objective: Objective
    topology: TopologyGraph
    p: float
    tau: int = 1
    seed: int = 0
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"transmission probability must lie in [0, 1], got {self.p}")
        if self.tau < 1:
            raise ConfigError(f"migration interval must be >= 1, got {self.tau}")
        if self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")

    @property
    def mu(self) -> int:
        return self.topology.num_vertices


@dataclass
class IslandState:
    current: np.ndarray
    fitness: int


@dataclass(frozen=True)
class RunOutcome:
    t_par: int
    t_seq: int
    t_com: int
    success: bool
    best_fitness: int


@dataclass(frozen=True)
class BatchResult:
    """Per-replication measurements of one configuration."""

    mu: int
    t_par: np.ndarray
    t_com: np.ndarray
    success: np.ndarray
    best_fitness: np.ndarray
    seeds: np.ndarray = field(repr=False)

    @property
    def t_seq(self) -> np.ndarray:
        return self.mu * self.t_par

    def __len__(self):
        return len(self.t_par)

    def outcome(self, r: int) -> RunOutcome:
        return RunOutcome(int(self.t_par[r]), int(self.t_seq[r]), int(self.t_com[r]),
                          bool(self.success[r]), int(self.best_fitness[r]))


@lru_cache(maxsize=None)
def flip_count_cdf(n: int) -> np.ndarray:
    """Cumulative distribution of the number of flipped bits, Bin(n, 1/n)."""
    if n == 1:
        return np.array([0.0, 1.0])
    q = 1.0 / n
    pmf = [math.comb(n, k) * q ** k * (1.0 - q) ** (n - k) for k in range(n + 1)]
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return cdf


def _log1mp(p: float) -> float:
    return math.log1p(-p) if 0.0 < p < 1.0 else 0.0


def _topology_key(cfg: ModelConfig) -> int:
    return _rng.text_key(cfg.topology.label)


def stream_states(cfg: ModelConfig, seed: int) -> list[list[int]]:
    """Mutation, migration and tie-break stream states for every island of one run."""
    mu, topo = cfg.mu, _topology_key(cfg)
    return [_rng.stream_state(seed, mu, topo, tag, i)
            for tag in (_rng.TAG_MUTATE, _rng.TAG_MIGRATE, _rng.TAG_TIE)
            for i in range(mu)]


def stream_states_many(cfg: ModelConfig, seeds: np.ndarray) -> np.ndarray:
    """:func:`stream_states` for many seeds at once; shape (len(seeds), 3 * mu, 4)."""
    mu, topo = cfg.mu, _topology_key(cfg)
    cols = [_rng.stream_states_many(seeds, mu, topo, tag, i)
            for tag in (_rng.TAG_MUTATE, _rng.TAG_MIGRATE, _rng.TAG_TIE)
            for i in range(mu)]
    return np.ascontiguousarray(np.stack(cols, axis=1))


class IslandStreams:
    """Per-island random substreams of a single run."""

    def __init__(self, cfg: ModelConfig, seed: int | None = None):
        states = stream_states(cfg, cfg.seed if seed is None else seed)
        mu = cfg.mu
        streams = [_rng.Stream(s) for s in states]
        self.mutate = streams[:mu]
        self.migrate = streams[mu:2 * mu]
        self.tie = streams[2 * mu:]


def standard_bit_mutation(x, stream: _rng.Stream) -> np.ndarray:
    """Offspring with every bit flipped independently with probability 1/n."""
    x = as_bits(x)
    flips = _kernels._pykernel.sample_flips(len(x), flip_count_cdf(len(x)), stream)
    y = x.copy()
    y[flips] ^= 1
    return y


def _fitness_fn(obj: Objective):
    return lambda x: evaluate(obj, np.frombuffer(bytes(x), dtype=np.uint8))


def initial_islands(cfg: ModelConfig, streams: IslandStreams, fixed_start=None) -> list[IslandState]:
    fixed = None if fixed_start is None else _check_start(cfg, fixed_start)
    pop = _kernels._pykernel.init_population(cfg.objective.n, cfg.mu, streams.mutate, fixed)
    fitness = _fitness_fn(cfg.objective)
    return [IslandState(np.frombuffer(bytes(x), dtype=np.uint8).copy(), fitness(x)) for x in pop]


def step_generation(islands: list[IslandState], cfg: ModelConfig, gen: int,
                    streams: IslandStreams) -> tuple[list[IslandState], int]:
    """One generation: mutation/selection everywhere, then migration if ``gen % tau == 0``."""
    if len(islands) != cfg.mu:
        raise ConfigError(f"expected {cfg.mu} islands, got {len(islands)}")
    k = _kernels._pykernel
    n = cfg.objective.n
    fitness = _fitness_fn(cfg.objective)
    cdf = flip_count_cdf(n)
    pop = [bytearray(isl.current.tobytes()) for isl in islands]
    fit = [int(isl.fitness) for isl in islands]
    for i in range(cfg.mu):
        fit[i] = k.mutate_select(pop[i], fit[i], n, cdf, streams.mutate[i], fitness)
    sent = 0
    if cfg.mu > 1 and cfg.p > 0.0 and gen % cfg.tau == 0:
        ptr, idx = cfg.topology.csr
        sent = k.migrate(pop, fit, ptr, idx, cfg.p, _log1mp(cfg.p), streams.migrate, streams.tie)
    return [IslandState(np.frombuffer(bytes(x), dtype=np.uint8).copy(), f)
            for x, f in zip(pop, fit)], sent


def _check_start(cfg: ModelConfig, fixed_start) -> np.ndarray:
    x = as_bits(fixed_start)
    if len(x) != cfg.objective.n:
        raise LengthMismatch(f"fixed start has {len(x)} bits, objective has {cfg.objective.n}")
    return x


def run_batch(cfg: ModelConfig, seeds, fixed_start=None, backend: str | None = None) -> BatchResult:
    """Run one replication per seed; results are in seed order."""
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    states = stream_states_many(cfg, seeds)
    fixed = None if fixed_start is None else _check_start(cfg, fixed_start)
    obj = cfg.objective
    code = obj.kernel_code
    kernel = _kernels.get(backend if code is not None else "python")
    ptr, idx = cfg.topology.csr
    evaluate_fn = None if code is not None else _fitness_fn(obj)
    t_par, t_com, success, best = kernel.run_islands(
        code if code is not None else -1, obj.n, obj.k, ptr, idx, float(cfg.p),
        _log1mp(cfg.p), cfg.tau, cfg.budget, flip_count_cdf(obj.n), states, fixed, evaluate_fn,
        obj.optimum)
    return BatchResult(cfg.mu, np.asarray(t_par), np.asarray(t_com), np.asarray(success, dtype=bool),
                       np.asarray(best), seeds)


def run(cfg: ModelConfig, fixed_start=None, backend: str | None = None) -> RunOutcome:
    return run_batch(cfg, [cfg.seed], fixed_start, backend).outcome(0)


def trace_run(cfg: ModelConfig, fixed_start=None) -> tuple[RunOutcome, list[list[int]]]:
    """Run through the reference kernel and record island fitnesses after every generation."""
    k = _kernels._pykernel
    streams = IslandStreams(cfg)
    obj = cfg.objective
    fixed = None if fixed_start is None else _check_start(cfg, fixed_start)
    ptr, idx = cfg.topology.csr
    trace: list[list[int]] = []
    t_par, t_com, success, best = k.run_one(
        obj.n, cfg.mu, _fitness_fn(obj), obj.optimum, ptr, idx, cfg.p, _log1mp(cfg.p), cfg.tau,
        cfg.budget, list(flip_count_cdf(obj.n)), streams.mutate, streams.migrate, streams.tie,
        fixed, trace)
    return RunOutcome(t_par, cfg.mu * t_par, t_com, bool(success), best), trace
