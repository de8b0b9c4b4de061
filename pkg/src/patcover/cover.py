"""Pattern covering: chop, sparsify every piece, and witness low treedepth."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats

from . import rng as rngmod
from .clustering import (ChopOutcome, ChopParams, SparsifyOutcome, SparsifyParams,
                         carve, chop, compute_cap_R, guess_portals, log2k, sparsify)
from .errors import InputError, ResourceError
from .graph import Graph, GrowthBound, bfs_distances, components

TRIAL_CEILING = 10 ** 7


@dataclass(frozen=True)
class Pattern:
    vertices: frozenset
    k: int

    def __post_init__(self):
        if len(self.vertices) > self.k:
            raise InputError(f"pattern has {len(self.vertices)} vertices, more than k={self.k}")


class EliminationForest:
    """Rooted forest on ``domain``; ``parent[v]`` is ``None`` for roots."""

    def __init__(self, parent: dict):
        self.parent = dict(parent)
        self.domain = frozenset(self.parent)
        self._depth_of = {}
        for v in self.parent:
            self._depth(v)
        self.depth = max(self._depth_of.values(), default=0)

    def _depth(self, v):
        chain = []
        while v is not None and v not in self._depth_of:
            chain.append(v)
            if len(chain) > len(self.parent):
                raise InputError("parent links contain a cycle")
            v = self.parent[v]
        base = 0 if v is None else self._depth_of[v]
        for u in reversed(chain):
            base += 1
            self._depth_of[u] = base
        return self._depth_of[chain[0]] if chain else base

    def depth_of(self, v) -> int:
        return self._depth_of[v]

    def ancestors(self, v) -> list:
        """Strict ancestors of ``v``, root first."""
        out = []
        v = self.parent[v]
        while v is not None:
            out.append(v)
            v = self.parent[v]
        out.reverse()
        return out

    def is_ancestor_related(self, u, v) -> bool:
        du, dv = self._depth_of[u], self._depth_of[v]
        if du > dv:
            u, v, du, dv = v, u, dv, du
        while dv > du:
            v = self.parent[v]
            dv -= 1
        return u == v

    def children(self) -> dict:
        kids = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                kids[p].append(v)
        for c in kids.values():
            c.sort()
        return kids

    def roots(self) -> list:
        return sorted(v for v, p in self.parent.items() if p is None)

    def violations(self, g: Graph) -> list[tuple[int, int]]:
        """Edges of ``g[domain]`` whose endpoints are not ancestor-related."""
        bad = []
        for u in self.domain:
            for w in g.adj[u]:
                if u < w and w in self.domain and not self.is_ancestor_related(u, w):
                    bad.append((u, w))
        return sorted(bad)

    def to_dict(self):
        return {"depth": self.depth,
                "parent": {str(v): p for v, p in sorted(self.parent.items())}}


def _chain(parent, vertices, top):
    for v in vertices:
        parent[v] = top
        top = v
    return top


def build_elimination_forest(g: Graph, carved: Iterable[int], portals: Iterable[int],
                             cluster_forest=None) -> EliminationForest:
    """Portals as one chain on top, each component of ``g[carved]`` hanging below.

    ``cluster_forest`` optionally replaces the per-component chain by another
    builder ``(g, component) -> parent dict``.
    """
    carved = set(carved)
    portals = sorted(set(portals))
    if carved & set(portals):
        raise InputError("carved and portal sets must be disjoint")
    parent = {}
    top = _chain(parent, portals, None)
    for comp in components(g, carved):
        if cluster_forest is None:
            _chain(parent, sorted(comp), top)
        else:
            sub = cluster_forest(g, comp)
            for v, p in sub.items():
                parent[v] = top if p is None else p
    forest = EliminationForest(parent)
    bad = forest.violations(g)
    assert not bad, f"elimination forest breaks ancestor property on {bad[:5]}"
    return forest


def separator_parent_map(g: Graph, domain: Iterable[int]) -> dict:
    """Elimination forest by repeatedly deleting a vertex that best splits its component."""
    parent = {}
    work = [(frozenset(c), None) for c in components(g, domain)]
    while work:
        comp, top = work.pop()
        if len(comp) <= 2:
            _chain(parent, sorted(comp), top)
            continue
        if len(comp) <= 200:
            def score(v):
                rest = components(g, comp - {v})
                spread = sum(d for d in bfs_distances(g, v, alive) if d > 0)
                return (max(len(c) for c in rest) if rest else 0, spread, v)
            alive = [False] * g.n
            for u in comp:
                alive[u] = True
            root = min(comp, key=score)
        else:
            root = max(sorted(comp), key=lambda v: sum(w in comp for w in g.adj[v]))
        parent[root] = top
        for c in components(g, comp - {root}):
            work.append((frozenset(c), root))
    return parent


def separator_forest(g: Graph, domain: Iterable[int]) -> EliminationForest:
    return EliminationForest(separator_parent_map(g, domain))


def merge_forests(forests: Iterable[EliminationForest]) -> EliminationForest:
    parent = {}
    for f in forests:
        overlap = parent.keys() & f.parent.keys()
        if overlap:
            raise InputError(f"forests overlap on {sorted(overlap)[:5]}")
        parent.update(f.parent)
    return EliminationForest(parent)


@dataclass
class CoverResult:
    retained: frozenset
    forest: EliminationForest
    chop_trace: ChopOutcome
    sparsify_traces: list[SparsifyOutcome]
    sparsify_params: list[SparsifyParams] = field(default_factory=list)

    def depth_bound(self) -> int:
        """Portals of the worst piece plus its largest carved cluster."""
        best = 0
        for tr in self.sparsify_traces:
            if tr.retained:
                biggest = max((len(c.ball) for c in tr.clusters), default=0)
                best = max(best, len(tr.portals) + biggest)
        return best

    def to_dict(self):
        return {"retained": sorted(self.retained),
                "forest": self.forest.to_dict(),
                "chop": self.chop_trace.to_dict(),
                "sparsify": [t.to_dict() for t in self.sparsify_traces]}


def _piece_params(k, growth, n_piece, cap_Rprime, center_rule):
    return SparsifyParams.for_component(k, growth.delta, n_piece, cap_Rprime, center_rule)


def cover_once(g: Graph, k: int, growth: GrowthBound, seed: int = rngmod.DEFAULT_SEED,
               trial: int = 0, cap_R: int | None = None, cap_Rprime: int | None = None,
               center_rule: str = "lowest", cluster_forest=None) -> CoverResult:
    """One draw of the covering set.

    The chop phase uses stream ``(trial, CHOP)``; the ``j``-th chop cluster is
    sparsified with its own stream ``(trial, SPARSIFY, j)``.
    """
    chop_params = ChopParams.from_growth(k, growth, cap_R, center_rule)
    ch = chop(g, chop_params, rngmod.stream(seed, trial, rngmod.CHOP))
    traces, params, forests = [], [], []
    for j, cl in enumerate(ch.clusters):
        sp = _piece_params(k, growth, len(cl.ball), cap_Rprime, center_rule)
        tr = sparsify(g, cl.ball, sp, rngmod.stream(seed, trial, rngmod.SPARSIFY, j))
        traces.append(tr)
        params.append(sp)
        if tr.retained:
            forests.append(build_elimination_forest(g, tr.carved, tr.portals, cluster_forest))
    retained = frozenset().union(*(t.retained for t in traces)) if traces else frozenset()
    return CoverResult(retained, merge_forests(forests), ch, traces, params)


def chop_once(g: Graph, k: int, growth: GrowthBound, seed: int = rngmod.DEFAULT_SEED,
              trial: int = 0, cap_R: int | None = None, center_rule: str = "lowest") -> ChopOutcome:
    """The chop phase of ``cover_once`` alone, drawing from the same stream."""
    params = ChopParams.from_growth(k, growth, cap_R, center_rule)
    return chop(g, params, rngmod.stream(seed, trial, rngmod.CHOP))


def portal_cover_probability(clusters, pattern: frozenset, params: SparsifyParams) -> float:
    """Exact probability over the portal guesses that every pattern vertex on a
    boundary gets kept and the budget is not exceeded, for fixed carving."""
    budget = params.portal_budget
    q = params.empty_guess_prob
    dist = np.zeros(budget + 1)
    dist[0] = 1.0
    for c in clusters:
        b = len(c.boundary)
        if b == 0:
            continue
        x = sum(v in pattern for v in c.boundary)
        new = np.zeros(budget + 1)
        if x == 0:
            new += q * dist
        for ell in range(1, budget + 1):
            m = min(ell, b)
            if m < x:
                continue
            hit = math.comb(b - x, m - x) / math.comb(b, m)
            w = (1.0 - q) / budget * hit
            if m <= budget:
                new[m:] += w * dist[:budget + 1 - m]
        dist = new
        if not dist.any():
            return 0.0
    return float(dist.sum())


def conditional_coverage(g: Graph, pattern: Iterable[int], k: int, growth: GrowthBound,
                         seed: int = rngmod.DEFAULT_SEED, trial: int = 0,
                         cap_R: int | None = None, cap_Rprime: int | None = None,
                         center_rule: str = "lowest") -> float:
    """``Pr[X subset of A]`` given the radii drawn in trial ``trial``.

    Uses the same streams as ``cover_once``; only the portal guesses are
    integrated out, so averaging over trials is an unbiased estimate.
    """
    x = frozenset(pattern)
    ch = chop_once(g, k, growth, seed, trial, cap_R, center_rule)
    if not x <= ch.retained:
        return 0.0
    prob = 1.0
    for j, cl in enumerate(ch.clusters):
        inside = x.intersection(cl.ball)
        if not inside:
            continue
        sp = _piece_params(k, growth, len(cl.ball), cap_Rprime, center_rule)
        clusters = carve(g, cl.ball, sp.p2, sp.cap_Rprime,
                         rngmod.stream(seed, trial, rngmod.SPARSIFY, j), sp.center_rule)
        prob *= portal_cover_probability(clusters, inside, sp)
        if prob == 0.0:
            break
    return prob


def _trial_values(args):
    g, x, k, growth, seed, lo, hi, phase, method, opts = args
    out = []
    for t in range(lo, hi):
        if phase == "chop":
            ch = chop_once(g, k, growth, seed, t, opts.get("cap_R"), opts.get("center_rule", "lowest"))
            out.append(float(x <= ch.retained))
        elif method == "conditional":
            out.append(conditional_coverage(g, x, k, growth, seed, t, **opts))
        else:
            res = cover_once(g, k, growth, seed, t, **opts)
            out.append(float(x <= res.retained))
    return out


def coverage_samples(g: Graph, x: Pattern, growth: GrowthBound, trials: int,
                     seed: int = rngmod.DEFAULT_SEED, phase: str = "cover",
                     method: str = "indicator", workers: int = 1, **opts) -> np.ndarray:
    """Per-trial coverage values, ordered by trial index."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    if phase not in ("chop", "cover"):
        raise InputError(f"unknown phase {phase!r}")
    if method not in ("indicator", "conditional"):
        raise InputError(f"unknown method {method!r}")
    xs = frozenset(x.vertices)
    workers = max(1, int(workers))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [(g, xs, x.k, growth, seed, int(lo), int(hi), phase, method, opts)
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers == 1:
        parts = [_trial_values(j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_trial_values, jobs))
    return np.array([v for part in parts for v in part])


def estimate_coverage(g: Graph, x: Pattern, growth: GrowthBound, trials: int,
                      seed: int = rngmod.DEFAULT_SEED, phase: str = "cover",
                      method: str = "indicator", workers: int = 1, **opts) -> tuple[float, float]:
    """Estimate ``Pr[X subset of A]`` and its standard error.

    ``method="indicator"`` counts covered trials.  ``method="conditional"``
    averages the exact conditional probability given each trial's radii; it
    has the same mean and stays informative when coverage is far below
    ``1 / trials``.
    """
    if not x.vertices:
        return 1.0, 0.0
    vals = coverage_samples(g, x, growth, trials, seed, phase, method, workers, **opts)
    p_hat = float(vals.mean())
    if method == "indicator":
        se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    else:
        se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return p_hat, se


def budget_exponent(k: int, delta: int) -> float:
    """``k^(1 - 1/(1+delta)) * log2(k)^2``."""
    return k ** (1.0 - 1.0 / (1 + delta)) * log2k(k) ** 2


def trial_budget(k: int, delta: int, c_hat: float, failure_prob: float,
                 ceiling: int = TRIAL_CEILING) -> int:
    """Trials needed so a pattern of size ``k`` is missed with probability at most ``failure_prob``."""
    if not c_hat > 0:
        raise InputError("c_hat must be positive")
    if not 0.0 < failure_prob < 1.0:
        raise InputError("failure_prob must lie in (0, 1)")
    log2_budget = math.log2(math.log(1.0 / failure_prob)) + c_hat * budget_exponent(k, delta)
    if log2_budget > math.log2(ceiling):
        raise ResourceError(f"trial budget 2^{log2_budget:.1f} exceeds ceiling {ceiling}; "
                            f"use a smaller k (k={k}, delta={delta}, c_hat={c_hat:.3g})")
    budget = math.ceil(math.log(1.0 / failure_prob) * 2.0 ** (c_hat * budget_exponent(k, delta)) - 1e-9)
    return max(1, budget)


@dataclass(frozen=True)
class ConstantFit:
    c_hat: float
    intercept: float
    r_squared: float
    ks: tuple[int, ...]
    x: tuple[float, ...]
    y: tuple[float, ...]

    def to_dict(self):
        return {"c_hat": self.c_hat, "intercept": self.intercept, "r_squared": self.r_squared,
                "points": [{"k": k, "x": x, "neg_log2_p": y} for k, x, y in zip(self.ks, self.x, self.y)]}


def fit_constant(ks: Iterable[int], p_hats: Iterable[float], delta: int) -> ConstantFit:
    """Least-squares fit of ``-log2 p`` against ``k^(1-1/(1+delta)) log2^2 k``."""
    ks = tuple(int(k) for k in ks)
    p = np.asarray(list(p_hats), dtype=float)
    if len(ks) != len(p) or len(ks) < 3:
        raise InputError("need at least three (k, p) points")
    if np.any(p <= 0):
        raise InputError("coverage estimates must be positive to take logarithms")
    x = np.array([budget_exponent(k, delta) for k in ks])
    y = -np.log2(p)
    res = stats.linregress(x, y)
    return ConstantFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2),
                       ks, tuple(x.tolist()), tuple(y.tolist()))


def plant_path(g: Graph, size: int, rng, attempts: int = 1000) -> list[int]:
    """A uniformly started random self-avoiding walk of ``size`` vertices."""
    if size < 1:
        return []
    if g.n == 0:
        raise InputError("cannot plant a pattern in an empty graph")
    for _ in range(attempts):
        walk = [int(rng.integers(g.n))]
        seen = {walk[0]}
        while len(walk) < size:
            options = [w for w in g.adj[walk[-1]] if w not in seen]
            if not options:
                break
            nxt = options[int(rng.integers(len(options)))]
            walk.append(nxt)
            seen.add(nxt)
        if len(walk) == size:
            return walk
    raise InputError(f"could not plant a {size}-vertex path after {attempts} attempts")


def plant_connected(g: Graph, size: int, rng, attempts: int = 1000) -> list[int]:
    """A random connected vertex set grown from a uniform start vertex."""
    if size < 1:
        return []
    for _ in range(attempts):
        start = int(rng.integers(g.n))
        chosen = [start]
        seen = {start}
        frontier = sorted(set(g.adj[start]))
        while len(chosen) < size and frontier:
            v = frontier.pop(int(rng.integers(len(frontier))))
            chosen.append(v)
            seen.add(v)
            frontier = sorted((set(frontier) | set(g.adj[v])) - seen)
        if len(chosen) == size:
            return sorted(chosen)
    raise InputError(f"could not plant a connected {size}-vertex set")
