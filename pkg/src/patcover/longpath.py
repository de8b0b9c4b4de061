"""Long Path: exact search on elimination forests, brute force, and the randomized driver.

A "k-path" has k vertices (k - 1 edges).
"""
from __future__ import annotations

import logging
from typing import Iterable, Sequence

from . import rng as rngmod
from .cover import EliminationForest, cover_once
from .errors import InputError, ResourceError
from .graph import Graph, GrowthBound

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 30
FREE = -1


def validate_path(g: Graph, path: Sequence[int], k: int | None = None,
                  within: Iterable[int] | None = None) -> list[str]:
    """Problems with ``path`` as a simple path of ``g``; empty when valid."""
    problems = []
    if k is not None and len(path) != k:
        problems.append(f"path has {len(path)} vertices, expected {k}")
    if len(set(path)) != len(path):
        problems.append("path repeats a vertex")
    for v in path:
        if not 0 <= v < g.n:
            problems.append(f"vertex {v} out of range")
            return problems
    if within is not None:
        allowed = set(within)
        outside = [v for v in path if v not in allowed]
        if outside:
            problems.append(f"vertices {outside[:5]} outside the allowed set")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            problems.append(f"({a}, {b}) is not an edge")
    return problems


def _dfs_path(g: Graph, allowed: set, k: int):
    adj = g.adj

    def reach(start, used):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in allowed and w not in used and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen)

    path = []
    used = set()

    def extend(v):
        path.append(v)
        used.add(v)
        if len(path) == k:
            return True
        # everything the path can still add lies in v's reachable region
        if len(path) - 1 + reach(v, used - {v}) >= k:
            for w in adj[v]:
                if w in allowed and w not in used and extend(w):
                    return True
        path.pop()
        used.discard(v)
        return False

    for s in sorted(allowed):
        if extend(s):
            return list(path)
    return None


def brute_force_long_path(g: Graph, restrict: Iterable[int] | None, k: int,
                          limit: int = BRUTE_FORCE_LIMIT) -> list[int] | None:
    """Exhaustive search for a k-vertex simple path inside ``g[restrict]``."""
    allowed = set(range(g.n)) if restrict is None else set(restrict)
    if len(allowed) > limit:
        raise ResourceError(f"brute force limited to {limit} vertices, got {len(allowed)}")
    if k <= 0:
        return []
    if k > len(allowed):
        return None
    return _dfs_path(g, allowed, k)


def short_path(g: Graph, k: int, restrict=None) -> list[int] | None:
    """k-path for ``k <= 3`` on graphs of any size."""
    if k > 3:
        raise InputError("short_path only handles k <= 3")
    allowed = None if restrict is None else set(restrict)
    ok = (lambda v: True) if allowed is None else allowed.__contains__
    for v in range(g.n):
        if not ok(v):
            continue
        if k <= 1:
            return [v][:max(k, 0)]
        nb = [w for w in g.adj[v] if ok(w)]
        if k == 2 and nb:
            return [v, nb[0]]
        if k == 3 and len(nb) >= 2:
            return [nb[0], v, nb[1]]
    return None


class _Found(Exception):
    def __init__(self, edges):
        self.edges = edges


def _join(comps, degs, x, y):
    """Add edge between tokens ``x`` and ``y``; ``None`` if it closes a cycle."""
    def locate(t):
        if degs[t] == 0:
            return None, t
        for i, (a, b) in enumerate(comps):
            if a == t:
                return i, b
            if b == t:
                return i, a
        raise AssertionError("token with degree 1 is not a component end")

    ix, ox = locate(x)
    iy, oy = locate(y)
    if ix is not None and ix == iy:
        return None
    rest = [c for i, c in enumerate(comps) if i != ix and i != iy]
    rest.append((ox, oy))
    degs[x] += 1
    degs[y] += 1
    return rest


def _finish(n, degs, comps, edges, k):
    """Canonical interface key; raises ``_Found`` on a complete path of >= k vertices."""
    free = 0
    closed = False
    for a, b in comps:
        free += (a == FREE) + (b == FREE)
        if a == FREE and b == FREE:
            closed = True
    if free > 2:
        return None
    if closed:
        if len(comps) == 1 and n + sum(d == 2 for d in degs) >= k:
            raise _Found(edges)
        return None
    return (tuple(degs), tuple(sorted(tuple(sorted(c)) for c in comps)))


def _keep(table, key, n, edges):
    # more vertices behind the same interface dominates: any completion still works
    if key is not None:
        old = table.get(key)
        if old is None or old[0] < n:
            table[key] = (n, edges)


def _merge_tables(ta: dict, tb: dict, k: int) -> dict:
    out = {}
    for (da, ca), (na, ea) in ta.items():
        for (db, cb), (nb, eb) in tb.items():
            n = na + nb
            degs = [x + y for x, y in zip(da, db)]
            if max(degs, default=0) > 2:
                continue
            comps = list(ca) + list(cb)
            # ancestors with degree 1 on both sides glue two components
            ok = True
            for t in range(len(degs)):
                if da[t] == 1 and db[t] == 1:
                    ends = [i for i, c in enumerate(comps) if t in c]
                    if len(ends) != 2:
                        ok = False
                        break
                    i, j = ends
                    a = comps[i][1] if comps[i][0] == t else comps[i][0]
                    b = comps[j][1] if comps[j][0] == t else comps[j][0]
                    comps = [c for m, c in enumerate(comps) if m not in (i, j)]
                    if a == b and a != FREE:
                        ok = False
                        break
                    comps.append((a, b))
            if not ok:
                continue
            edges = ea | eb
            _keep(out, _finish(n, degs, comps, edges, k), n, edges)
    return out


def _path_from_edges(edges, k):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = min(v for v, nb in adj.items() if len(nb) == 1)
    path = [start]
    prev = None
    while True:
        nxt = [w for w in adj[path[-1]] if w != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    return path[:k]


def dp_long_path(g: Graph, forest: EliminationForest, k: int) -> list[int] | None:
    """Exact k-path search in ``g[forest.domain]``.

    Bottom-up over the forest.  A state at vertex ``v`` records how a partial
    solution inside the subtree of ``v`` meets the ancestors of ``v``: the
    number of subtree vertices used, each ancestor's degree into the subtree,
    and which ancestor ends (or free path ends) are joined by path pieces.
    Among states with the same interface only the one using the most vertices
    is kept, so the table size is exponential in the depth only.
    """
    domain = forest.domain
    if k <= 0:
        return []
    if k == 1:
        return [min(domain)] if domain else None
    if k > len(domain):
        return None
    kids = forest.children()
    for root in forest.roots():
        order = []
        anc_pos = {}
        stack = [(root, ())]
        while stack:
            v, anc = stack.pop()
            order.append(v)
            anc_pos[v] = anc
            for c in kids[v]:
                stack.append((c, anc + (v,)))
        tables = {}
        try:
            for v in reversed(order):
                anc = anc_pos[v]
                t = len(anc)
                base = {((0,) * (t + 1), ()): (0, frozenset())}
                for c in kids[v]:
                    base = _merge_tables(base, tables.pop(c), k)
                up = [i for i, a in enumerate(anc) if g.has_edge(v, a)]
                table = {}
                for (degs, comps), (n, edges) in base.items():
                    if degs[t] == 0:
                        _keep(table, (degs[:t], comps), n, edges)
                    for choice in _subsets(up, 2 - degs[t]):
                        d = list(degs)
                        cs = list(comps)
                        ok = True
                        for a in choice:
                            if d[a] == 2:
                                ok = False
                                break
                            cs = _join(cs, d, t, a)
                            if cs is None:
                                ok = False
                                break
                        if not ok:
                            continue
                        if d[t] == 0:
                            cs.append((FREE, FREE))
                        elif d[t] == 1:
                            cs = [tuple(FREE if x == t else x for x in c) for c in cs]
                        new_edges = edges | frozenset((v, anc[a]) for a in choice)
                        _keep(table, _finish(n + 1, d[:t], cs, new_edges, k), n + 1, new_edges)
                tables[v] = table
        except _Found as hit:
            path = _path_from_edges(hit.edges, k)
            assert not validate_path(g, path, k, domain)
            return path
    return None


def _subsets(items, max_size):
    out = [()]
    if max_size >= 1:
        out += [(a,) for a in items]
    if max_size >= 2:
        out += [(a, b) for i, a in enumerate(items) for b in items[i + 1:]]
    return out


def solve_long_path(g: Graph, k: int, growth: GrowthBound, trials: int,
                    seed: int = rngmod.DEFAULT_SEED, first_trial: int = 0,
                    **cover_opts) -> list[int] | None:
    """Repeat cover + exact search; first verified path wins.

    ``None`` can be wrong only when every trial missed all k-paths.
    """
    if k < 1:
        raise InputError("k must be positive")
    if k < 4:
        log.warning("k=%d < 4: searching directly without covering", k)
        return short_path(g, k)
    for t in range(first_trial, first_trial + trials):
        res = cover_once(g, k, growth, seed, t, **cover_opts)
        if len(res.retained) < k:
            continue
        path = dp_long_path(g, res.forest, k)
        if path is not None:
            problems = validate_path(g, path, k, res.retained)
            if problems:
                raise AssertionError(f"search returned an invalid path: {problems}")
            return path
    return None
