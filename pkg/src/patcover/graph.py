"""Graphs, metric balls, growth checks and instance generators."""
from __future__ import annotations

import itertools
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError

UNREACHABLE = -1
MAX_VERTICES = 5_000_000


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InputError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self._m = sum(len(s) for s in nbrs) // 2

    @property
    def m(self) -> int:
        return self._m

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adj[u]
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GridEmbedding:
    dimension: int
    coords: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise InputError("embedding dimension must be positive")
        for c in self.coords:
            if len(c) != self.dimension:
                raise InputError(f"coordinate {c} does not have dimension {self.dimension}")

    def validate(self, g: Graph) -> list[str]:
        """Return a list of problems; empty when the embedding certifies a grid subgraph."""
        problems = []
        if len(self.coords) != g.n:
            problems.append(f"{len(self.coords)} coordinates for {g.n} vertices")
            return problems
        seen = {}
        for v, c in enumerate(self.coords):
            if c in seen:
                problems.append(f"vertices {seen[c]} and {v} share coordinate {c}")
            seen[c] = v
        for u, v in g.edges():
            d = sum(abs(a - b) for a, b in zip(self.coords[u], self.coords[v]))
            if d != 1:
                problems.append(f"edge ({u}, {v}) has L1 length {d}")
        return problems

    def bounding_box(self) -> tuple[tuple[int, int], ...]:
        if not self.coords:
            return ()
        cols = list(zip(*self.coords))
        return tuple((min(c), max(c)) for c in cols)

    def side_length(self) -> int:
        box = self.bounding_box()
        return max((hi - lo + 1 for lo, hi in box), default=0)


@dataclass(frozen=True)
class GrowthBound:
    C: float
    delta: int

    def __post_init__(self):
        if not self.C > 0:
            raise InputError("growth constant C must be positive")
        if self.delta < 1:
            raise InputError("growth degree delta must be at least 1")

    def ball_limit(self, r: int) -> float:
        return self.C * r ** self.delta


def _check_vertex(g: Graph, v: int):
    if not 0 <= v < g.n:
        raise InputError(f"vertex {v} out of range for n={g.n}")


def _check_radius(r: int):
    if r < 1:
        raise InputError(f"radius must be at least 1, got {r}")


def bfs_distances(g: Graph, v: int, alive=None, limit=None) -> list[int]:
    """Unweighted distances from ``v``; ``UNREACHABLE`` marks the rest.

    ``alive`` (a boolean sequence) restricts the search to an induced subgraph,
    ``limit`` stops the search after distance ``limit``.
    """
    _check_vertex(g, v)
    dist = [UNREACHABLE] * g.n
    dist[v] = 0
    queue = deque([v])
    adj = g.adj
    while queue:
        u = queue.popleft()
        du = dist[u]
        if limit is not None and du >= limit:
            continue
        for w in adj[u]:
            if dist[w] == UNREACHABLE and (alive is None or alive[w]):
                dist[w] = du + 1
                queue.append(w)
    return dist


def layers(g: Graph, v: int, r: int, alive=None) -> tuple[list[int], list[int]]:
    """Return ``(ball, boundary)`` = vertices at distance ``< r`` and ``== r``.

    Only explores up to distance ``r``, so cost is proportional to the ball.
    """
    ball = [v]
    seen = {v}
    frontier = [v]
    adj = g.adj
    for _ in range(r - 1):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in seen and (alive is None or alive[w]):
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            return ball, []
        ball.extend(nxt)
        frontier = nxt
    bnd = []
    for u in frontier:
        for w in adj[u]:
            if w not in seen and (alive is None or alive[w]):
                seen.add(w)
                bnd.append(w)
    return ball, bnd


def ball(g: Graph, v: int, r: int, alive=None) -> set[int]:
    _check_vertex(g, v)
    _check_radius(r)
    return set(layers(g, v, r, alive)[0])


def boundary(g: Graph, v: int, r: int, alive=None) -> set[int]:
    _check_vertex(g, v)
    _check_radius(r)
    return set(layers(g, v, r, alive)[1])


def components(g: Graph, restrict: Iterable[int]) -> list[set[int]]:
    """Connected components of ``g[restrict]``, ordered by smallest vertex."""
    inside = set(restrict)
    out = []
    seen: set[int] = set()
    for s in sorted(inside):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w in inside and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        out.append(comp)
    return out


def eccentricity(g: Graph, v: int) -> int:
    return max(bfs_distances(g, v))


def check_growth(g: Graph, bound: GrowthBound) -> list[tuple[int, int, int]]:
    """All ``(v, r, |B(v, r)|)`` with ``|B(v, r)| > C r^delta`` for ``1 <= r <= ecc(v) + 1``."""
    violations = []
    for v in range(g.n):
        dist = bfs_distances(g, v)
        ecc = max(dist)
        counts = np.bincount([d for d in dist if d != UNREACHABLE], minlength=ecc + 1)
        cumulative = np.cumsum(counts)
        for r in range(1, ecc + 2):
            size = int(cumulative[r - 1])
            if size > bound.ball_limit(r):
                violations.append((v, r, size))
    return violations


def empirical_growth_constant(g: Graph, delta: int) -> float:
    """Smallest C such that ``check_growth(g, GrowthBound(C, delta))`` is empty."""
    best = 0.0
    for v in range(g.n):
        dist = [d for d in bfs_distances(g, v) if d != UNREACHABLE]
        cumulative = np.cumsum(np.bincount(dist))
        for r in range(1, len(cumulative) + 1):
            best = max(best, cumulative[r - 1] / r ** delta)
    return float(best)


def _grid_points(delta: int, side: int):
    return list(itertools.product(range(side), repeat=delta))


def _graph_on_points(points: Sequence[tuple[int, ...]]) -> tuple[Graph, GridEmbedding]:
    index = {p: i for i, p in enumerate(points)}
    edges = []
    for i, p in enumerate(points):
        for d in range(len(p)):
            q = p[:d] + (p[d] + 1,) + p[d + 1:]
            j = index.get(q)
            if j is not None:
                edges.append((i, j))
    dim = len(points[0]) if points else 1
    return Graph(len(points), edges), GridEmbedding(dim, tuple(points))


def generate_grid(delta: int, side: int, max_vertices: int = MAX_VERTICES) -> tuple[Graph, GridEmbedding]:
    if delta < 1 or side < 1:
        raise InputError("delta and side must be positive")
    if side ** delta > max_vertices:
        raise ResourceError(f"grid with side {side} in dimension {delta} exceeds {max_vertices} vertices")
    g, emb = _graph_on_points(_grid_points(delta, side))
    return g, GridEmbedding(delta, emb.coords)


def generate_perturbed_subgrid(delta: int, side: int, delete_prob: float, rng,
                               max_vertices: int = MAX_VERTICES) -> tuple[Graph, GridEmbedding]:
    """Grid with every vertex deleted independently with probability ``delete_prob``."""
    if not 0.0 <= delete_prob <= 1.0:
        raise InputError("delete_prob must lie in [0, 1]")
    if delta < 1 or side < 1:
        raise InputError("delta and side must be positive")
    if side ** delta > max_vertices:
        raise ResourceError(f"grid with side {side} in dimension {delta} exceeds {max_vertices} vertices")
    points = _grid_points(delta, side)
    keep = rng.random(len(points)) >= delete_prob
    kept = [p for p, k in zip(points, keep) if k]
    if not kept:
        return Graph(0), GridEmbedding(delta, ())
    g, emb = _graph_on_points(kept)
    return g, GridEmbedding(delta, emb.coords)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def induced(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Re-indexed copy of ``g[vertices]`` and the list mapping new ids to old ids."""
    old = sorted(set(vertices))
    new = {v: i for i, v in enumerate(old)}
    edges = [(new[u], new[w]) for u in old for w in g.adj[u] if w in new and u < w]
    return Graph(len(old), edges), old
