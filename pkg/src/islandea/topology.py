"""Migration topologies as explicit directed graphs."""
from __future__ import annotations

import enum
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class TopologyError(ValueError):
    pass


class InvalidSize(TopologyError):
    pass


class TorusTooSmall(TopologyError):
    pass


class NotConnected(TopologyError):
    pass


class UnknownTopology(TopologyError):
    pass


class TopologyKind(str, enum.Enum):
    UNI_RING = "uniring"
    BI_RING = "biring"
    TORUS = "torus"
    HYPERCUBE = "hypercube"
    COMPLETE = "complete"

    @property
    def undirected(self) -> bool:
        return self is not TopologyKind.UNI_RING


@dataclass(frozen=True)
class TopologyGraph:
    kind: TopologyKind
    num_vertices: int
    out_edges: tuple[tuple[int, ...], ...]
    params: tuple[tuple[str, int], ...] = field(default=())

    @property
    def mu(self) -> int:
        return self.num_vertices

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.out_edges)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.out_edges) for v in nb]

    def param(self, name: str) -> int:
        return dict(self.params)[name]

    @property
    def params_label(self) -> str:
        """Compact parameter string used in CSV output (``topo_params``)."""
        p = dict(self.params)
        if self.kind is TopologyKind.TORUS:
            return f"{p['width']}x{p['height']}"
        if self.kind is TopologyKind.HYPERCUBE:
            return f"d={p['dim']}"
        return f"mu={self.num_vertices}"

    @property
    def label(self) -> str:
        return f"{self.kind.value}:{self.params_label}"

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency as (offsets, targets) int64 arrays for the kernels."""
        ptr = np.zeros(self.num_vertices + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(nb) for nb in self.out_edges])
        idx = np.fromiter((v for nb in self.out_edges for v in nb), dtype=np.int64,
                          count=int(ptr[-1]))
        return ptr, idx


def _make(kind, adjacency, **params) -> TopologyGraph:
    out = []
    for u, nbs in enumerate(adjacency):
        seen = []
        for v in nbs:
            if v != u and v not in seen:
                seen.append(v)
        out.append(tuple(seen))
    return TopologyGraph(kind, len(adjacency), tuple(out), tuple(sorted(params.items())))


def uni_ring(mu: int) -> TopologyGraph:
    _check_size(mu)
    return _make(TopologyKind.UNI_RING, [[(v + 1) % mu] for v in range(mu)], mu=mu)


def bi_ring(mu: int) -> TopologyGraph:
    _check_size(mu)
    return _make(TopologyKind.BI_RING, [[(v + 1) % mu, (v - 1) % mu] for v in range(mu)],
                 mu=mu)


def torus(width: int, height: int) -> TopologyGraph:
    """Row-major ``width`` x ``height`` torus with 4-neighbourhoods.

    ``torus(1, 1)`` is accepted as the single-island degenerate case.
    """
    if width == 1 and height == 1:
        return _make(TopologyKind.TORUS, [[]], width=1, height=1)
    if width < 3 or height < 3:
        raise TorusTooSmall(f"torus sides must be >= 3, got {width}x{height}")
    adj = []
    for v in range(width * height):
        y, x = divmod(v, width)
        adj.append([
            y * width + (x + 1) % width,
            y * width + (x - 1) % width,
            ((y + 1) % height) * width + x,
            ((y - 1) % height) * width + x,
        ])
    return _make(TopologyKind.TORUS, adj, width=width, height=height)


def hypercube(dim: int) -> TopologyGraph:
    if dim < 0:
        raise InvalidSize(f"hypercube dimension must be >= 0, got {dim}")
    mu = 1 << dim
    return _make(TopologyKind.HYPERCUBE, [[v ^ (1 << b) for b in range(dim)] for v in range(mu)],
                 dim=dim)


def complete(mu: int) -> TopologyGraph:
    _check_size(mu)
    return _make(TopologyKind.COMPLETE, [[v for v in range(mu) if v != u] for u in range(mu)],
                 mu=mu)


def _check_size(mu: int) -> None:
    if mu < 1:
        raise InvalidSize(f"number of islands must be >= 1, got {mu}")


def build(kind, mu: int | None = None, *, width: int | None = None, height: int | None = None,
          dim: int | None = None) -> TopologyGraph:
    """Build a topology of the given kind.

    Rings and the complete graph take ``mu``; the torus takes ``width`` and
    ``height`` (or a ``mu`` that is factorised as squarely as possible); the
    hypercube takes ``dim`` (or a power-of-two ``mu``).
    """
    kind = TopologyKind(kind)
    if kind is TopologyKind.UNI_RING:
        return uni_ring(_need(mu))
    if kind is TopologyKind.BI_RING:
        return bi_ring(_need(mu))
    if kind is TopologyKind.COMPLETE:
        return complete(_need(mu))
    if kind is TopologyKind.HYPERCUBE:
        if dim is None:
            mu = _need(mu)
            if mu < 1 or mu & (mu - 1):
                raise InvalidSize(f"hypercube needs a power-of-two island count, got {mu}")
            dim = mu.bit_length() - 1
        elif mu is not None and mu != 1 << dim:
            raise InvalidSize(f"mu={mu} does not match hypercube dimension {dim}")
        return hypercube(dim)
    if width is None or height is None:
        width, height = torus_sides(_need(mu))
    elif mu is not None and mu != width * height:
        raise InvalidSize(f"mu={mu} does not match torus {width}x{height}")
    return torus(width, height)


def _need(mu):
    if mu is None:
        raise InvalidSize("number of islands is required")
    _check_size(mu)
    return mu


def torus_sides(mu: int) -> tuple[int, int]:
    """Most square factorisation ``w x h = mu`` with both sides >= 3."""
    if mu == 1:
        return 1, 1
    for h in range(math.isqrt(mu), 2, -1):
        if mu % h == 0 and mu // h >= 3:
            return mu // h, h
    raise TorusTooSmall(f"no torus with sides >= 3 has {mu} vertices")


_SPEC = re.compile(r"^(?P<kind>[a-z]+)(?::(?P<arg>.+))?$")


def parse(text: str, mu: int | None = None) -> TopologyGraph:
    """Parse a CLI/config topology spelling such as ``torus:4x4`` or ``hypercube``."""
    m = _SPEC.match(text.strip().lower())
    if not m:
        raise UnknownTopology(f"cannot parse topology {text!r}")
    name, arg = m.group("kind"), m.group("arg")
    try:
        kind = TopologyKind(name)
    except ValueError:
        raise UnknownTopology(f"unknown topology kind {name!r}") from None
    if arg is None:
        return build(kind, mu)
    if kind is TopologyKind.TORUS:
        w, _, h = arg.partition("x")
        return build(kind, mu, width=int(w), height=int(h))
    if kind is TopologyKind.HYPERCUBE:
        return build(kind, mu, dim=int(arg.removeprefix("d=")))
    size = int(arg.removeprefix("mu="))
    if mu is not None and mu != size:
        raise InvalidSize(f"topology {text!r} has {size} vertices, expected {mu}")
    return build(kind, size)


def out_neighbors(g: TopologyGraph, v: int) -> list[int]:
    if not 0 <= v < g.num_vertices:
        raise IndexError(f"vertex {v} out of range for {g.num_vertices} vertices")
    return list(g.out_edges[v])


def bfs_distances(g: TopologyGraph, source: int) -> list[int]:
    """Directed hop distances from ``source``; -1 marks unreachable vertices."""
    dist = [-1] * g.num_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.out_edges[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_strongly_connected(g: TopologyGraph) -> bool:
    if g.num_vertices == 1:
        return True
    if min(bfs_distances(g, 0)) < 0:
        return False
    reverse = [[] for _ in range(g.num_vertices)]
    for u, v in g.edges():
        reverse[v].append(u)
    rg = TopologyGraph(g.kind, g.num_vertices, tuple(map(tuple, reverse)))
    return min(bfs_distances(rg, 0)) >= 0


def diameter(g: TopologyGraph) -> int:
    """Largest shortest-path length over all ordered vertex pairs."""
    best = 0
    for s in range(g.num_vertices):
        dist = bfs_distances(g, s)
        if min(dist) < 0:
            raise NotConnected(f"{g.label} is not strongly connected")
        best = max(best, max(dist))
    return best


def is_symmetric(g: TopologyGraph) -> bool:
    edges = set(g.edges())
    return all((v, u) in edges for u, v in edges)
