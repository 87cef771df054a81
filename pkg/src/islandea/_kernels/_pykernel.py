"""Pure-Python kernels.

This module is the executable reference for the compiled kernel in
``_ckernel.pyx``: both consume the random streams in exactly the same order
and therefore produce identical results.  Keep the two in lockstep.
"""
from __future__ import annotations

import numpy as np

from ..objective import _leading_ones, jump_value
from ..rng import Stream

ONEMAX, LEADING_ONES, JUMP = 0, 1, 2


def builtin_fitness(kind: int, n: int, k: int):
    if kind == ONEMAX:
        return lambda x: sum(x)
    if kind == LEADING_ONES:
        return _leading_ones
    if kind == JUMP:
        return lambda x: jump_value(sum(x), n, k)
    raise ValueError(f"unknown kernel objective code {kind}")


def init_population(n: int, mu: int, mutate_streams, fixed_start=None) -> list[bytearray]:
    if fixed_start is not None:
        return [bytearray(bytes(fixed_start)) for _ in range(mu)]
    pop = []
    words = (n + 63) // 64
    for i in range(mu):
        stream = mutate_streams[i]
        w = [stream.next64() for _ in range(words)]
        pop.append(bytearray((w[b >> 6] >> (b & 63)) & 1 for b in range(n)))
    return pop


def sample_flips(n: int, cdf, stream: Stream) -> list[int]:
    """Positions flipped by standard bit mutation: Bin(n, 1/n) count, uniform subset."""
    u = stream.uniform()
    count = 0
    while u >= cdf[count]:
        count += 1
    flips: list[int] = []
    while len(flips) < count:
        pos = stream.below(n)
        if pos not in flips:
            flips.append(pos)
    return flips


def mutate_select(x: bytearray, fx: int, n: int, cdf, stream: Stream, fitness) -> int:
    """One (1+1) EA step on ``x`` in place; returns the new fitness."""
    flips = sample_flips(n, cdf, stream)
    if not flips:
        return fx
    y = bytearray(x)
    for pos in flips:
        y[pos] ^= 1
    fy = fitness(y)
    if fy >= fx:
        x[:] = y
        return fy
    return fx


def migrate(pop, fit, out_ptr, out_idx, p: float, log1mp: float, migrate_streams,
            tie_streams) -> int:
    """Migration and immigrant selection on a frozen snapshot; returns copies sent."""
    mu = len(pop)
    best_in = [-1] * mu
    best_src = [-1] * mu
    count = [0] * mu
    sent = 0

    def consider(i, j):
        fi = fit[i]
        if fi < fit[j]:
            return
        if fi > best_in[j]:
            best_in[j], best_src[j], count[j] = fi, i, 1
        elif fi == best_in[j]:
            count[j] += 1
            if tie_streams[j].below(count[j]) == 0:
                best_src[j] = i

    for i in range(mu):
        lo, hi = int(out_ptr[i]), int(out_ptr[i + 1])
        deg = hi - lo
        if p >= 1.0:
            for e in range(lo, hi):
                sent += 1
                consider(i, int(out_idx[e]))
        else:
            stream = migrate_streams[i]
            pos = stream.geometric(log1mp)
            while pos < deg:
                sent += 1
                consider(i, int(out_idx[lo + int(pos)]))
                pos = pos + 1.0 + stream.geometric(log1mp)

    if any(count):
        snapshot = [bytes(x) for x in pop]
        snap_fit = list(fit)
        for j in range(mu):
            if count[j]:
                pop[j][:] = snapshot[best_src[j]]
                fit[j] = snap_fit[best_src[j]]
    return sent


def make_streams(states_row, mu: int):
    streams = [Stream(st) for st in states_row]
    return streams[:mu], streams[mu:2 * mu], streams[2 * mu:3 * mu]


def run_islands(kind, n, jump_k, out_ptr, out_idx, p, log1mp, tau, budget, cdf, states,
                fixed_start=None, evaluate=None, optimum=None):
    """Run ``len(states)`` independent replications of the island model.

    ``states`` has shape (reps, 3 * mu, 4): mutation, migration and tie-break
    streams per island.  Returns arrays (t_par, t_com, success, best_fitness).
    """
    reps = states.shape[0]
    mu = len(out_ptr) - 1
    fitness = evaluate if evaluate is not None else builtin_fitness(kind, n, jump_k)
    if evaluate is None:
        optimum = _optimum(kind, n, jump_k)
    cdf = [float(c) for c in cdf]
    t_par = np.zeros(reps, dtype=np.int64)
    t_com = np.zeros(reps, dtype=np.int64)
    success = np.zeros(reps, dtype=np.uint8)
    best = np.zeros(reps, dtype=np.int64)
    for r in range(reps):
        mut, mig, tie = make_streams(states[r], mu)
        res = run_one(n, mu, fitness, optimum, out_ptr, out_idx, p, log1mp, tau, budget, cdf,
                      mut, mig, tie, fixed_start)
        t_par[r], t_com[r], success[r], best[r] = res
    return t_par, t_com, success, best


def _optimum(kind, n, k):
    return n + k if kind == JUMP else n


def run_one(n, mu, fitness, optimum, out_ptr, out_idx, p, log1mp, tau, budget, cdf,
            mut, mig, tie, fixed_start=None, trace=None):
    pop = init_population(n, mu, mut, fixed_start)
    fit = [fitness(x) for x in pop]
    if trace is not None:
        trace.append(list(fit))
    if max(fit) >= optimum:
        return 0, 0, 1, max(fit)
    sent = 0
    migrating = mu > 1 and p > 0.0
    for gen in range(1, budget + 1):
        for i in range(mu):
            fit[i] = mutate_select(pop[i], fit[i], n, cdf, mut[i], fitness)
        if max(fit) >= optimum:
            if trace is not None:
                trace.append(list(fit))
            return gen, sent, 1, max(fit)
        if migrating and gen % tau == 0:
            sent += migrate(pop, fit, out_ptr, out_idx, p, log1mp, mig, tie)
        if trace is not None:
            trace.append(list(fit))
    return budget, sent, 0, max(fit)


def propagate_round(informed_round, rnd: int, out_ptr, out_idx, p: float, stream: Stream) -> list[int]:
    """One synchronous propagation round; returns the newly informed vertices in order."""
    newly = []
    for u in range(len(informed_round)):
        ru = informed_round[u]
        if ru < 0 or ru >= rnd:
            continue
        for e in range(int(out_ptr[u]), int(out_ptr[u + 1])):
            v = int(out_idx[e])
            if informed_round[v] >= 0:
                continue
            if p >= 1.0 or stream.uniform() < p:
                informed_round[v] = rnd
                newly.append(v)
    return newly


def hitting_times(out_ptr, out_idx, p, source, budget, states):
    """Propagation hitting times; row r, column k-1 is the first round with >= k informed."""
    reps = states.shape[0]
    mu = len(out_ptr) - 1
    T = np.full((reps, mu), -1, dtype=np.int64)
    for r in range(reps):
        stream = Stream(states[r])
        informed_round = [-1] * mu
        informed_round[source] = 0
        T[r, 0] = 0
        count = 1
        if p <= 0.0:
            continue
        rnd = 0
        while count < mu and rnd < budget:
            rnd += 1
            for _ in propagate_round(informed_round, rnd, out_ptr, out_idx, p, stream):
                count += 1
                T[r, count - 1] = rnd
    return T
