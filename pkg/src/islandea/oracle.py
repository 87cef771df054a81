"""Exact expected parallel running times of tiny island models.

The joint state packs island ``i`` into bits ``[n*i, n*(i+1))`` of an integer
(bit ``b`` of an island is position ``b`` of its bitstring).  With ``tau > 1``
the state also carries the index of the next generation modulo ``tau``.  One
transition is one generation: every island mutates and selects, then, if the
generation migrates, every target independently takes its best incoming
migrant.  States holding an optimal island are absorbing, so the expected
absorption time is exactly the expected ``t_par``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.sparse.linalg as spla

from .island_model import ModelConfig
from .objective import as_bits, evaluate

DEFAULT_CAP = 65536
DEFAULT_NNZ_CAP = 20_000_000
DENSE_LIMIT = 4096
RESIDUAL_TOL = 1e-8


class OracleError(RuntimeError):
    pass


class StateSpaceTooLarge(OracleError):
    pass


class SingularSystem(OracleError):
    pass


@dataclass(frozen=True, eq=False)
class ChainModel:
    n: int
    mu: int
    tau: int
    transition: sp.csr_matrix
    absorbing: np.ndarray

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    def encode(self, islands, phase: int = 1) -> int:
        x = 0
        for i, bits in enumerate(islands):
            x |= _pack(as_bits(bits)) << (self.n * i)
        return (phase % self.tau) * (1 << (self.n * self.mu)) + x

    def decode(self, state: int) -> tuple[list[str], int]:
        joint = 1 << (self.n * self.mu)
        phase, x = divmod(int(state), joint)
        islands = ["".join(str((x >> (self.n * i + b)) & 1) for b in range(self.n))
                   for i in range(self.mu)]
        return islands, phase


def _pack(bits: np.ndarray) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def _island_fitness(cfg: ModelConfig) -> np.ndarray:
    n = cfg.objective.n
    return np.array([evaluate(cfg.objective, np.array([(x >> b) & 1 for b in range(n)], dtype=np.uint8))
                     for x in range(1 << n)], dtype=np.int64)


def island_kernel(cfg: ModelConfig) -> np.ndarray:
    """Single-island mutation + elitist selection matrix over the 2^n bitstrings."""
    n = cfg.objective.n
    size = 1 << n
    fit = _island_fitness(cfg)
    xs = np.arange(size)
    flips = np.array([bin(d).count("1") for d in range(size)])
    q = 1.0 / n
    M = np.zeros((size, size))
    for x in range(size):
        z = xs ^ x
        prob = q ** flips[z ^ x] * (1.0 - q) ** (n - flips[z ^ x])
        accept = fit[z] >= fit[x]
        np.add.at(M[x], z[accept], prob[accept])
        M[x, x] += prob[~accept].sum()
    return M


def migration_kernel(cfg: ModelConfig, fit: np.ndarray) -> sp.csr_matrix:
    """Joint migration matrix over 2^(n*mu) states, factorised over targets.

    Given its in-neighbours' fitnesses, a target ends with the best sent
    migrant at least as fit as itself.  The best sent level is L with
    probability P(none sent above L) * P(some sent at L); within L every
    in-neighbour is equally likely to be chosen.
    """
    n, mu, p = cfg.objective.n, cfg.mu, cfg.p
    g = cfg.topology
    in_nb = [[] for _ in range(mu)]
    for u, v in g.edges():
        in_nb[v].append(u)
    mask = (1 << n) - 1
    size = 1 << (n * mu)
    rows, cols, vals = [], [], []
    for x in range(size):
        isl = [(x >> (n * i)) & mask for i in range(mu)]
        f = [int(fit[v]) for v in isl]
        outcomes = [(x, 1.0)]
        for j in range(mu):
            cand = sorted({f[u] for u in in_nb[j] if f[u] >= f[j]}, reverse=True)
            if not cand:
                continue
            dist = []
            none_above = 1.0
            for level in cand:
                srcs = [u for u in in_nb[j] if f[u] == level]
                at_least_one = 1.0 - (1.0 - p) ** len(srcs)
                for u in srcs:
                    dist.append((isl[u], none_above * at_least_one / len(srcs)))
                none_above *= (1.0 - p) ** len(srcs)
            dist.append((isl[j], none_above))
            shift = n * j
            clear = ~(mask << shift)
            outcomes = [((y & clear) | (v << shift), w * pv)
                        for y, w in outcomes for v, pv in dist if pv > 0.0]
        for y, w in outcomes:
            rows.append(x)
            cols.append(y)
            vals.append(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(size, size))


def _joint_optimal(cfg: ModelConfig, fit: np.ndarray) -> np.ndarray:
    n, mu = cfg.objective.n, cfg.mu
    opt_island = fit >= cfg.objective.optimum
    x = np.arange(1 << (n * mu))
    out = np.zeros(len(x), dtype=bool)
    for i in range(mu):
        out |= opt_island[(x >> (n * i)) & ((1 << n) - 1)]
    return out


def build_chain(cfg: ModelConfig, cap: int = DEFAULT_CAP, nnz_cap: int = DEFAULT_NNZ_CAP) -> ChainModel:
    """Exact one-generation transition matrix of ``cfg``; cached per config."""
    return _build_chain(cfg, cap, nnz_cap)


@lru_cache(maxsize=64)
def _build_chain(cfg: ModelConfig, cap: int, nnz_cap: int) -> ChainModel:
    n, mu, tau = cfg.objective.n, cfg.mu, cfg.tau
    joint = 1 << (n * mu)
    if joint * tau > cap:
        raise StateSpaceTooLarge(f"{joint * tau} states exceed the cap of {cap}")
    M = island_kernel(cfg)
    island_nnz = int(np.count_nonzero(M))
    if island_nnz ** mu > nnz_cap:
        raise StateSpaceTooLarge(f"mutation kernel would hold {island_nnz ** mu} nonzeros")
    Ms = sp.csr_matrix(M)
    K = Ms
    for _ in range(mu - 1):
        K = sp.kron(Ms, K, format="csr")
    fit = _island_fitness(cfg)
    if mu > 1 and cfg.p > 0.0:
        G = migration_kernel(cfg, fit)
        migrating = (K @ G).tocsr()
    else:
        migrating = K
    if tau == 1:
        P = migrating
    else:
        # phase = index of the next generation modulo tau; generation g migrates iff g % tau == 0
        blocks = [[None] * tau for _ in range(tau)]
        for ph in range(tau):
            blocks[ph][(ph + 1) % tau] = migrating if ph == 0 else K
        P = sp.bmat(blocks, format="csr")
    absorbing = np.tile(_joint_optimal(cfg, fit), tau)
    P = P.tolil()
    for s in np.flatnonzero(absorbing):
        P.rows[s] = [int(s)]
        P.data[s] = [1.0]
    P = P.tocsr()
    P.eliminate_zeros()
    return ChainModel(n, mu, tau, P, absorbing)


def start_distribution(chain: ChainModel, start=None) -> np.ndarray:
    """Initial distribution: uniform random islands (``None``), one bitstring on every island,
    a sequence of per-island bitstrings, or an explicit probability vector."""
    joint = 1 << (chain.n * chain.mu)
    phase_offset = (1 % chain.tau) * joint
    dist = np.zeros(chain.num_states)
    if start is None:
        dist[phase_offset:phase_offset + joint] = 1.0 / joint
        return dist
    if isinstance(start, np.ndarray) and start.dtype.kind == "f":
        if start.shape != (chain.num_states,) or abs(start.sum() - 1.0) > 1e-10:
            raise ValueError("start distribution must be a probability vector over all states")
        return start.astype(float)
    if isinstance(start, str) or (len(start) and np.isscalar(start[0])):
        islands = [start] * chain.mu
    else:
        islands = list(start)
        if len(islands) != chain.mu:
            raise ValueError(f"expected {chain.mu} island bitstrings")
    for bits in islands:
        if len(as_bits(bits)) != chain.n:
            raise ValueError(f"bitstrings must have length {chain.n}")
    dist[chain.encode(islands)] = 1.0
    return dist


def absorption_times(chain: ChainModel) -> np.ndarray:
    """Expected steps to absorption from every state; NaN where absorption is unreachable."""
    P = chain.transition
    absorbing = chain.absorbing
    # states that can reach absorption: reverse reachability from the absorbing set
    reach = np.zeros(chain.num_states, dtype=bool)
    if absorbing.any():
        rev = P.T.tocsr()
        order = csgraph.breadth_first_order
        for s in np.flatnonzero(absorbing):
            if reach[s]:
                continue
            nodes = order(rev, int(s), directed=True, return_predecessors=False)
            reach[nodes] = True
    transient = np.flatnonzero(~absorbing & reach)
    t = np.full(chain.num_states, np.nan)
    t[absorbing] = 0.0
    if len(transient) == 0:
        return t
    Q = P[transient][:, transient]
    A = sp.identity(len(transient), format="csr") - Q
    b = np.ones(len(transient))
    if len(transient) <= DENSE_LIMIT:
        sol = scipy.linalg.solve(A.toarray(), b)
    else:
        sol = spla.spsolve(A.tocsc(), b)
    residual = np.max(np.abs(A @ sol - b))
    if not np.all(np.isfinite(sol)) or residual > RESIDUAL_TOL:
        raise SingularSystem(f"linear solve residual {residual:g} exceeds {RESIDUAL_TOL:g}")
    t[transient] = sol
    return t


def expected_absorption_time(chain: ChainModel, start=None) -> float:
    dist = start_distribution(chain, start)
    t = absorption_times(chain)
    support = dist > 0
    if np.isnan(t[support]).any():
        raise SingularSystem("absorption is unreachable from part of the start distribution")
    return float(dist[support] @ t[support])


def expected_t_par(cfg: ModelConfig, start=None, cap: int = DEFAULT_CAP) -> float:
    return expected_absorption_time(build_chain(cfg, cap), start)


def survival_curve(M: np.ndarray, optimal: np.ndarray, start: np.ndarray, tol: float = 1e-15,
                   max_steps: int = 10_000_000) -> np.ndarray:
    """P(T > t) for t = 0, 1, ... of a single island, until it drops below ``tol``."""
    keep = ~optimal
    Mt = M[np.ix_(keep, keep)]
    v = start[keep].astype(float)
    out = []
    for _ in range(max_steps):
        mass = v.sum()
        out.append(mass)
        if mass < tol:
            return np.array(out)
        v = v @ Mt
    raise SingularSystem("single-island survival did not vanish")


def independent_min_time(cfg: ModelConfig, starts=None) -> float:
    """E[min of mu independent single-island times] = sum_t prod_i P(T_i > t).

    Islands start uniformly at random unless per-island bitstrings are given.
    """
    M = island_kernel(cfg)
    fit = _island_fitness(cfg)
    optimal = fit >= cfg.objective.optimum
    size = len(fit)
    curves = []
    for i in range(cfg.mu):
        d = np.full(size, 1.0 / size)
        if starts is not None:
            d = np.zeros(size)
            d[_pack(as_bits(starts[i]))] = 1.0
        curves.append(survival_curve(M, optimal, d))
    length = min(len(c) for c in curves)
    prod = np.ones(length)
    for c in curves:
        prod *= c[:length]
    return float(np.sum(prod))
