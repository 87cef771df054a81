"""Closed-form upper bounds on parallel running time and propagation time.

All sums over fitness levels run over the m - 1 non-optimal levels.  ``log``
is base 2 and ``ln`` is natural; every report records which base it used.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .objective import LevelPartition
from .topology import TopologyKind


class BoundError(ValueError):
    pass


class DomainError(BoundError):
    pass


class ZeroSuccessProbability(BoundError):
    pass


class UnsupportedKind(BoundError):
    pass


class NonConvergent(BoundError):
    pass


class BoundSource(str, enum.Enum):
    SEQ_FITNESS_LEVEL = "SeqFitnessLevel"
    GENERAL_PARALLEL = "GeneralParallel"
    LEVEL_TIME = "LevelTime"
    RING = "RingThm5"
    TORUS = "TorusThm7"
    HYPERCUBE = "HypercubeThm8"
    COMPLETE = "CompleteThm9"
    COMPLETE_REFINED = "CompleteRefinedThm10"
    PROPAGATION_GENERAL = "PropagationLemma2"
    PROPAGATION_COMPLETE = "PropagationLemma4"
    ROWE_MITAVSKIY_CANNINGS = "RoweMitavskiyCannings"
    COMM_FACTOR = "CommFactor"
    BEST = "Best"


@dataclass(frozen=True)
class BoundReport:
    value: float
    source: BoundSource
    inputs: dict = field(default_factory=dict)
    log_base: str = ""

    def __float__(self):
        return float(self.value)


def _success_probs(part) -> tuple[int, list[float]]:
    if isinstance(part, LevelPartition):
        s = list(part.s)
        m = part.m
    else:
        s = [float(v) for v in part]
        m = len(s) + 1
    if any(v <= 0 for v in s):
        raise ZeroSuccessProbability("all success probabilities must be positive")
    if any(v > 1 for v in s):
        raise DomainError("success probabilities cannot exceed 1")
    return m, s


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"transmission probability must lie in [0, 1], got {p}")


def _check_mu(mu: int) -> None:
    if mu < 1:
        raise DomainError(f"number of islands must be >= 1, got {mu}")


def seq_fitness_level_bound(part) -> float:
    """Expected time of a single elitist island: the sum of 1/s_i."""
    _, s = _success_probs(part)
    return math.fsum(1.0 / v for v in s)


def general_parallel_bound(s: Sequence[float] | LevelPartition,
                           mu_seq: Callable[[int], float] | float, tau: int = 1,
                           eps: float = 1e-12) -> float:
    """Sum over levels of sum_t (1 - s_i)^(island-generations spent on the level after t generations).

    ``mu_seq(j)`` is a lower bound on the number of islands on the level in
    the j-th generation after it is first reached (j >= 1), non-decreasing in
    j.  With interval ``tau`` the count is only refreshed at migrations, so
    generations t in block b = t // tau share the exponent
    tau * sum_{j=1..b} mu_seq((j - 1) * tau + 1).  Blocks are summed until a
    term drops below ``eps``; the rest is a geometric tail at the next
    block's island count, which is exact for constant counts and an upper
    bound otherwise.
    """
    probs = list(s.s) if isinstance(s, LevelPartition) else [float(v) for v in s]
    if any(v <= 0 for v in probs):
        raise NonConvergent("a level with zero success probability is never left")
    if any(v > 1 for v in probs):
        raise DomainError("success probabilities cannot exceed 1")
    if tau < 1:
        raise DomainError("migration interval must be >= 1")
    mu_of = mu_seq if callable(mu_seq) else (lambda j, c=float(mu_seq): c)
    total = []
    for si in probs:
        if si == 1.0:
            total.append(float(tau))
            continue
        log_q = math.log1p(-si)
        exponent, level, b = 0.0, [], 0
        while True:
            term = math.exp(exponent * log_q)
            level.append(tau * term)
            mu_next = float(mu_of(b * tau + 1))
            if mu_next <= 0:
                raise DomainError("island counts must be positive")
            step = tau * mu_next
            if term < eps:
                ratio = math.exp(step * log_q)
                level.append(tau * term * ratio / (1.0 - ratio))
                break
            exponent += step
            b += 1
        total.append(math.fsum(level))
    return math.fsum(total)


def level_time_bound(E_Tk: float, k: int, s: float) -> float:
    """Expected time to leave a level once ``k`` islands are informed after ``E_Tk`` generations."""
    if k < 1 or not 0 < s <= 1 or E_Tk < 0:
        raise DomainError("need k >= 1, 0 < s <= 1 and E_Tk >= 0")
    return E_Tk + 1.0 + 1.0 / (k * s)


_RING_KINDS = (TopologyKind.UNI_RING, TopologyKind.BI_RING)


def _kind(kind) -> TopologyKind:
    if kind == "ring":
        return TopologyKind.UNI_RING
    try:
        return TopologyKind(kind)
    except ValueError:
        raise UnsupportedKind(f"no bound for topology kind {kind!r}") from None


# per-level costs whose sum over the m - 1 levels is at most the closed-form topology bound

def _ring_level(si, mu, p):
    return 2.0 / math.sqrt(p * si) + 1.0 / (mu * si)


def _torus_level(si, mu, p):
    return 3.0 ** (5.0 / 3.0) / (p ** (2.0 / 3.0) * si ** (1.0 / 3.0)) + 1.0 / (mu * si)


def _hypercube_level(si, mu, p):
    return (49.0 + 24.0 * math.log2(1.0 / si)) / p + 1.0 / (mu * si)


def _complete_level(si, mu, p):
    return 1.0 + 2.0 / p + 2.0 / (mu * si)


def _complete_refined_level(si, mu, p):
    spread = 8.0 * math.log2(mu)
    if p < 1.0 / mu:
        spread /= p * mu
    return 1.0 + spread + 1.0 / (mu * si)


def topology_bound(kind, part, mu: int, p: float) -> BoundReport:
    """Parallel-time bound for ring (any strongly connected), torus, hypercube or complete topologies.

    Returns an infinite value when ``p == 0``: without transmission the
    topology-specific bounds say nothing.
    """
    kind = _kind(kind)
    m, s = _success_probs(part)
    _check_p(p)
    _check_mu(mu)
    inputs = {"kind": kind.value, "m": m, "mu": mu, "p": p}
    inv = math.fsum(1.0 / v for v in s)
    if kind in _RING_KINDS:
        source = BoundSource.RING
        value = (2.0 / math.sqrt(p) * math.fsum(v ** -0.5 for v in s) + inv / mu) if p else math.inf
        return BoundReport(value, source, inputs)
    if kind is TopologyKind.TORUS:
        value = (3.0 ** (5.0 / 3.0) / p ** (2.0 / 3.0) * math.fsum(v ** (-1.0 / 3.0) for v in s)
                 + inv / mu) if p else math.inf
        return BoundReport(value, BoundSource.TORUS, inputs)
    if kind is TopologyKind.HYPERCUBE:
        value = ((49.0 * m + 24.0 * math.fsum(math.log2(1.0 / v) for v in s)) / p
                 + inv / mu) if p else math.inf
        return BoundReport(value, BoundSource.HYPERCUBE, inputs, log_base="2")
    value = (m + 2.0 * m / p + 2.0 * inv / mu) if p else math.inf
    return BoundReport(value, BoundSource.COMPLETE, inputs)


def complete_refined_bound(part, mu: int, p: float) -> BoundReport:
    """Complete-topology bound with the faster spreading estimate, two regimes around p = 1/mu."""
    m, s = _success_probs(part)
    if mu < 2:
        raise DomainError("the refined complete-graph bound needs mu >= 2")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"transmission probability must lie in (0, 1], got {p}")
    spread = 8.0 * m * math.log2(mu)
    if p < 1.0 / mu:
        spread /= p * mu
    value = m + spread + math.fsum(1.0 / v for v in s) / mu
    return BoundReport(value, BoundSource.COMPLETE_REFINED, {"m": m, "mu": mu, "p": p},
                       log_base="2")


def diameter_spread_bound(k: int, s_k: float, p: float, c: float = 2.0) -> BoundReport:
    """Expected time until the ``s_k`` vertices within distance ``k`` of the source are informed."""
    if c <= 1 or k < 1 or s_k < 1 or not 0 < p <= 1:
        raise DomainError("need c > 1, k >= 1, s_k >= 1, 0 < p <= 1")
    value = c / (c - 1.0) * max(4.0 * k, 8.0 * math.log(c * s_k)) / p
    return BoundReport(value, BoundSource.PROPAGATION_GENERAL,
                       {"k": k, "s_k": s_k, "p": p, "c": c}, log_base="e")


def complete_spread_bound(mu: int, p: float) -> BoundReport:
    """Propagation time on the complete graph."""
    if mu < 1 or not 0 < p <= 1:
        raise DomainError("need mu >= 1 and 0 < p <= 1")
    value = 8.0 * math.log2(mu) / min(p * mu, 1.0)
    return BoundReport(value, BoundSource.PROPAGATION_COMPLETE, {"mu": mu, "p": p}, log_base="2")


def undirected_spread_bound(diam: int, n: int, p: float) -> BoundReport:
    """General propagation-time bound for undirected graphs with ``n`` vertices."""
    if diam < 0 or n < 1 or not 0 < p <= 1:
        raise DomainError("need diam >= 0, n >= 1 and 0 < p <= 1")
    value = (8.0 * diam + 8.0 * math.log2(n)) / (p * (1.0 - math.exp(-1.0)))
    return BoundReport(value, BoundSource.ROWE_MITAVSKIY_CANNINGS,
                       {"diam": diam, "n": n, "p": p}, log_base="2")


def propagation_time_bound(kind: str, **params) -> BoundReport:
    """Dispatch on ``GeneralLemma2`` (k, s_k, p, c), ``CompleteLemma4`` (mu, p) or ``RoweMC`` (diam, n, p)."""
    table = {"GeneralLemma2": diameter_spread_bound, "CompleteLemma4": complete_spread_bound,
             "RoweMC": undirected_spread_bound}
    try:
        fn = table[kind]
    except KeyError:
        raise UnsupportedKind(f"unknown propagation bound {kind!r}") from None
    return fn(**params)


def communication_factor(kind, mu: int, p: float) -> float:
    """Bound on E[T^com] / E[T^par] for the topology kind."""
    kind = _kind(kind)
    if kind in _RING_KINDS:
        return 2.0 * p * mu
    if kind is TopologyKind.TORUS:
        return 4.0 * p * mu
    if kind is TopologyKind.HYPERCUBE:
        return p * mu * math.log2(mu) if mu > 1 else 0.0
    return p * mu * mu


def level_costs(kind, si: float, mu: int, p: float) -> dict[BoundSource, float]:
    """Every applicable per-level time bound for one level with success probability ``si``.

    The ring bound holds for every strongly connected topology, so it is
    offered for all kinds.
    """
    kind = _kind(kind)
    costs = {}
    if p > 0:
        costs[BoundSource.RING] = _ring_level(si, mu, p)
        if kind is TopologyKind.TORUS:
            costs[BoundSource.TORUS] = _torus_level(si, mu, p)
        elif kind is TopologyKind.HYPERCUBE:
            costs[BoundSource.HYPERCUBE] = _hypercube_level(si, mu, p)
        elif kind is TopologyKind.COMPLETE:
            costs[BoundSource.COMPLETE] = _complete_level(si, mu, p)
            if mu >= 2:
                costs[BoundSource.COMPLETE_REFINED] = _complete_refined_level(si, mu, p)
    costs[BoundSource.SEQ_FITNESS_LEVEL] = 1.0 / si
    return costs


def best_bound(part, mu: int, p: float, kind) -> BoundReport:
    """Sum over levels of the smallest applicable per-level bound (including 1/s_i)."""
    m, s = _success_probs(part)
    _check_p(p)
    _check_mu(mu)
    kind = _kind(kind)
    used: dict[str, int] = {}
    total = []
    for si in s:
        costs = level_costs(kind, si, mu, p)
        src = min(costs, key=costs.get)
        used[src.value] = used.get(src.value, 0) + 1
        total.append(costs[src])
    return BoundReport(math.fsum(total), BoundSource.BEST,
                       {"kind": kind.value, "m": m, "mu": mu, "p": p, "levels_by_source": used},
                       log_base="2")


def all_bounds(part, mu: int, p: float, kind, diam: int | None = None) -> list[BoundReport]:
    """Every bound applicable to one configuration, for tabulation."""
    kind = _kind(kind)
    reports = [BoundReport(seq_fitness_level_bound(part), BoundSource.SEQ_FITNESS_LEVEL)]
    if p > 0:
        reports.append(topology_bound(TopologyKind.UNI_RING, part, mu, p))
        if kind not in _RING_KINDS:
            reports.append(topology_bound(kind, part, mu, p))
        if kind is TopologyKind.COMPLETE and mu >= 2:
            reports.append(complete_refined_bound(part, mu, p))
    reports.append(best_bound(part, mu, p, kind))
    reports.append(BoundReport(communication_factor(kind, mu, p), BoundSource.COMM_FACTOR,
                               {"kind": kind.value, "mu": mu, "p": p}))
    if p > 0 and mu > 1:
        if kind is TopologyKind.COMPLETE:
            reports.append(complete_spread_bound(mu, p))
        if diam is not None and kind.undirected:
            reports.append(diameter_spread_bound(max(diam, 1), mu, p))
            reports.append(undirected_spread_bound(diam, mu, p))
    return reports
