"""Exhaustive Hamiltonian path search and validators."""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from ..errors import ResourceError
from ..graph import Graph

BRUTE_FORCE_LIMIT = 30
ENUMERATION_LIMIT = 200


def validate_ham_path(g: Graph, path: Sequence[int]) -> list[str]:
    """Problems with ``path`` as a Hamiltonian path of ``g``; empty when valid."""
    problems = []
    if len(path) != g.n:
        problems.append(f"path has {len(path)} vertices, graph has {g.n}")
    if len(set(path)) != len(path):
        problems.append("path repeats a vertex")
    if any(not 0 <= v < g.n for v in path):
        problems.append("vertex out of range")
        return problems
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            problems.append(f"({a}, {b}) is not an edge")
            if len(problems) > 10:
                break
    return problems


def validate_ham_cycle(g: Graph, cycle: Sequence[int]) -> list[str]:
    problems = validate_ham_path(g, cycle)
    if len(cycle) >= 3 and not g.has_edge(cycle[-1], cycle[0]):
        problems.append(f"closing pair ({cycle[-1]}, {cycle[0]}) is not an edge")
    if len(cycle) < 3:
        problems.append("a cycle needs at least three vertices")
    return problems


def _search(g: Graph, start: int, end: int | None, skip: frozenset) -> Iterator[list[int]]:
    """All Hamiltonian paths of ``g - skip`` from ``start`` (to ``end`` if given)."""
    adj = g.adj
    n_target = g.n - len(skip)
    visited = bytearray(g.n)
    for s in skip:
        visited[s] = 1
    free = [sum(1 for w in adj[v] if not visited[w]) for v in range(g.n)]

    def ok_vertex(x, head):
        if visited[x]:
            return True
        # with an open end any vertex may finish the path, so only one neighbour is certain
        need = 1 if end is None or x == end else 2
        return free[x] + (head in adj[x]) >= need

    def connected(head):
        seen = {head}
        stack = [head]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not visited[w] and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) - 1 == n_target - len(path)

    path = []

    def visit(v):
        visited[v] = 1
        path.append(v)
        for w in adj[v]:
            free[w] -= 1

    def unvisit(v):
        for w in adj[v]:
            free[w] += 1
        path.pop()
        visited[v] = 0

    def rec():
        head = path[-1]
        if len(path) == n_target:
            if end is None or head == end:
                yield list(path)
            return
        if head == end:
            return
        for w in adj[head]:
            if visited[w]:
                continue
            visit(w)
            good = all(ok_vertex(x, w) for x in adj[head]) and all(ok_vertex(x, w) for x in adj[w])
            if good and end is not None and not visited[end]:
                good = ok_vertex(end, w)
            if good and connected(w):
                yield from rec()
            unvisit(w)

    if start in skip or (end is not None and end in skip):
        return
    visit(start)
    if n_target == 1:
        if end is None or end == start:
            yield [start]
        return
    if connected(start):
        yield from rec()


def enumerate_ham_paths(g: Graph, start: int, end: int | None = None,
                        optional: Iterable[int] = (), limit: int = ENUMERATION_LIMIT) -> list[list[int]]:
    """Every path from ``start`` (to ``end``) visiting all vertices except any subset of ``optional``."""
    if g.n > limit:
        raise ResourceError(f"enumeration limited to {limit} vertices, got {g.n}")
    optional = sorted(set(optional))
    out = []
    for mask in range(1 << len(optional)):
        skip = frozenset(v for i, v in enumerate(optional) if mask >> i & 1)
        out.extend(_search(g, start, end, skip))
    return out


def brute_force_ham_path(g: Graph, limit: int = BRUTE_FORCE_LIMIT) -> list[int] | None:
    """Some Hamiltonian path of ``g``, or ``None`` when there is none."""
    if g.n > limit:
        raise ResourceError(f"brute force limited to {limit} vertices, got {g.n}")
    if g.n == 0:
        return []
    # an endpoint of degree one, if any, must start the path
    starts = [v for v in range(g.n) if g.degree(v) == 1] or range(g.n)
    for s in starts:
        for p in _search(g, s, None, frozenset()):
            return p
    return None


def brute_force_ham_cycle(g: Graph, limit: int = BRUTE_FORCE_LIMIT) -> list[int] | None:
    if g.n > limit:
        raise ResourceError(f"brute force limited to {limit} vertices, got {g.n}")
    if g.n < 3:
        return None
    for w in g.adj[0]:
        for p in _search(g, 0, w, frozenset()):
            return p
    return None
