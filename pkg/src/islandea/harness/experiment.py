"""Sweeps over (function, n, topology, mu, p, tau), replications, summaries and bound audits."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .. import bounds, objective, rng, topology
from ..island_model import DEFAULT_BUDGET, BatchResult, ModelConfig, run_batch
from .stats import Moments, efficiency_ci, moments, speedup_efficiency, Z99


@dataclass(frozen=True)
class Point:
    function: str
    n: int
    mu: int
    topology: str
    p: float
    tau: int = 1

    def config(self, budget: int = DEFAULT_BUDGET) -> ModelConfig:
        return ModelConfig(objective.parse(self.function, self.n), topology.parse(self.topology, self.mu),
                           float(self.p), tau=self.tau, budget=budget)


@dataclass(frozen=True)
class ExperimentSpec:
    functions: tuple[str, ...] = ("onemax",)
    ns: tuple[int, ...] = (32,)
    topologies: tuple[str, ...] = ("complete",)
    mus: tuple[int, ...] = (4,)
    ps: tuple[float, ...] = (1.0,)
    taus: tuple[int, ...] = (1,)
    reps: int = 100
    base_seed: int = 0
    budget: int = DEFAULT_BUDGET
    fixed_start: str | None = None
    skip_infeasible: bool = True

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        for name in ("functions", "ns", "topologies", "mus", "ps", "taus"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} is empty")

    def grid(self) -> list[Point]:
        """Every sweep point in a fixed order; the list index is the point's seed key."""
        return [Point(f, n, mu, t, float(p), tau) for f, n, t, mu, p, tau in itertools.product(
            self.functions, self.ns, self.topologies, self.mus, self.ps, self.taus)]


@dataclass(frozen=True)
class RunRecord:
    function: str
    n: int
    mu: int
    topology: str
    topo_params: str
    p: float
    tau: int
    rep: int
    seed: int
    t_par: int
    t_seq: int
    t_com: int
    success: int
    best_fitness: int


@dataclass(frozen=True)
class PointResult:
    index: int
    point: Point
    cfg: ModelConfig
    batch: BatchResult

    @property
    def function(self) -> str:
        return self.cfg.objective.label

    @property
    def kind(self) -> str:
        return self.cfg.topology.kind.value

    def records(self):
        b = self.batch
        for r in range(len(b)):
            yield RunRecord(self.function, self.point.n, self.cfg.mu, self.kind,
                            self.cfg.topology.params_label, self.point.p, self.point.tau, r,
                            int(b.seeds[r]), int(b.t_par[r]), int(b.t_seq[r]), int(b.t_com[r]),
                            int(b.success[r]), int(b.best_fitness[r]))


@dataclass(frozen=True)
class SummaryRow:
    function: str
    n: int
    mu: int
    topology: str
    topo_params: str
    p: float
    tau: int
    reps: int
    t_par: Moments
    t_seq: Moments
    t_com: Moments
    success_rate: float
    speedup: float | None = None
    efficiency: float | None = None
    efficiency_ci95: float | None = None
    efficiency_ci99: float | None = None
    bound: float | None = None
    bound_source: str = ""
    violation: bool | None = None

    @property
    def group(self) -> tuple:
        return (self.function, self.n, self.topology, self.p, self.tau)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    points: list[PointResult]
    summaries: list[SummaryRow]
    skipped: list[tuple[Point, str]] = field(default_factory=list)

    def records(self):
        for pr in self.points:
            yield from pr.records()


def run_point(spec: ExperimentSpec, index: int, point: Point, backend: str | None = None) -> PointResult:
    cfg = point.config(spec.budget)
    seeds = rng.derive_seeds(spec.base_seed, index, count=spec.reps)
    return PointResult(index, point, cfg, run_batch(cfg, seeds, spec.fixed_start, backend))


def run_experiment(spec: ExperimentSpec, backend: str | None = None, progress=None) -> ExperimentResult:
    """Run every point of the sweep; the result is a pure function of ``spec``."""
    points, skipped = [], []
    for index, point in enumerate(spec.grid()):
        try:
            point.config(spec.budget)
        except topology.TopologyError as exc:
            if not spec.skip_infeasible:
                raise
            skipped.append((point, str(exc)))
            continue
        points.append(run_point(spec, index, point, backend))
        if progress is not None:
            progress(point)
    summaries = audit_bounds(summarize(rec for pr in points for rec in pr.records()))
    return ExperimentResult(spec, points, summaries, skipped)


def summarize(records) -> list[SummaryRow]:
    """Per-point statistics plus speedup/efficiency against a single-island baseline.

    Records are grouped by their point columns in first-seen order.  The
    baseline is the mu = 1 point with the same function, n, topology kind, p
    and tau; failing that, any mu = 1 point with the same function and n (a
    single island ignores topology, p and tau).
    """
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        key = (rec.function, rec.n, rec.mu, rec.topology, rec.topo_params, rec.p, rec.tau)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key, recs in groups.items():
        rows.append(SummaryRow(*key, len(recs), moments([r.t_par for r in recs]),
                               moments([r.t_seq for r in recs]), moments([r.t_com for r in recs]),
                               float(np.mean([r.success for r in recs]))))
    exact = {r.group: r for r in rows if r.mu == 1}
    loose = {}
    for r in rows:
        if r.mu == 1:
            loose.setdefault((r.function, r.n), r)
    out = []
    for r in rows:
        base = exact.get(r.group) or loose.get((r.function, r.n))
        if base is None or r.t_par.mean <= 0:
            out.append(r)
            continue
        speedup, eff = speedup_efficiency(base.t_par.mean, r.t_par.mean, r.mu)
        out.append(replace(r, speedup=speedup, efficiency=eff,
                           efficiency_ci95=efficiency_ci(base.t_par, r.t_par, r.mu),
                           efficiency_ci99=efficiency_ci(base.t_par, r.t_par, r.mu, Z99)))
    return out


def point_bound(function: str, n: int, mu: int, kind: str, p: float, tau: int) -> bounds.BoundReport:
    """Tightest applicable bound on E[t_par].

    The topology bounds assume migration every generation; with tau > 1, or
    when nothing is transmitted, the single-island fitness-level bound is used
    since the best island alone already makes that much progress.
    """
    part = objective.canonical_partition(objective.parse(function, n))
    if tau == 1:
        return bounds.best_bound(part, mu, p, kind)
    return bounds.BoundReport(bounds.seq_fitness_level_bound(part), bounds.BoundSource.SEQ_FITNESS_LEVEL,
                              {"tau": tau})


def audit_bounds(summary: list[SummaryRow]) -> list[SummaryRow]:
    """Attach the bound to every row and flag rows whose mean minus the 99% half-width exceeds it."""
    out = []
    for r in summary:
        rep = point_bound(r.function, r.n, r.mu, r.topology, r.p, r.tau)
        source = rep.source.value
        if rep.source is bounds.BoundSource.BEST:
            source = "+".join(sorted(rep.inputs["levels_by_source"]))
        out.append(replace(r, bound=rep.value, bound_source=source,
                           violation=bool(r.t_par.mean - r.t_par.ci99 > rep.value)))
    return out


def any_violation(summary: list[SummaryRow]) -> bool:
    return any(r.violation for r in summary)
