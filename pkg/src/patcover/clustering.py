"""Randomized ball carving.

``chop`` cuts a graph into balls of bounded radius while discarding their
boundaries.  ``sparsify`` repeats the carving with a smaller radius on one
piece and may keep a few boundary vertices ("portals") back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError
from .graph import Graph, GrowthBound, layers

CENTER_RULES = ("lowest", "random")


def log2k(k: float) -> float:
    # base 2, floored at 1 so small k never shrinks the logarithmic factors
    return max(math.log2(k), 1.0)


def sparsify_acceptance(k: int, delta: int) -> float:
    return min(1.0, k ** (-1.0 / (1 + delta)) * log2k(k))


def portal_budget(k: int, delta: int) -> int:
    # the epsilon keeps exact integers such as 8^(2/3) * 3 = 12 from rounding down
    return max(1, math.floor(k ** (1.0 - 1.0 / (1 + delta)) * log2k(k) + 1e-9))


def sample_capped_geometric(p: float, cap: int, rng) -> int:
    """Number of trials up to and including the first success, truncated at ``cap``."""
    if not 0.0 < p <= 1.0:
        raise InputError(f"success probability must lie in (0, 1], got {p}")
    if cap < 1:
        raise InputError(f"cap must be at least 1, got {cap}")
    if p == 1.0:
        return 1
    return min(int(rng.geometric(p)), cap)


def compute_cap_R(k: int, growth: GrowthBound) -> int:
    """Smallest R with ``(1 - 1/k)^(R-1) < 1 / (k * k * C * (R+1)^delta)``.

    Compared in log space; the left side decays geometrically so the scan ends.
    """
    if k < 4:
        raise InputError("k must be at least 4")
    log_q = math.log1p(-1.0 / k)
    R = 1
    while True:
        lhs = (R - 1) * log_q
        rhs = -(2 * math.log(k) + math.log(growth.C) + growth.delta * math.log(R + 1))
        if lhs < rhs:
            return R
        R += 1


def bad_radius_allowance(k: int, delta: int) -> int:
    return math.ceil(10 * k ** (1.0 / (1 + delta)) - 1e-9)


def compute_cap_Rprime(k: int, delta: int, n_component: int) -> int:
    """Smallest R' above the bad-radius allowance t with ``(1 - p2)^(R' - t) <= 1 / (k n)``."""
    if k < 4:
        raise InputError("k must be at least 4")
    if n_component < 1:
        raise InputError("component size must be at least 1")
    t = bad_radius_allowance(k, delta)
    p2 = sparsify_acceptance(k, delta)
    if p2 >= 1.0:
        return t + 1
    log_q = math.log1p(-p2)
    target = -math.log(k * n_component)
    R = t + 1
    while (R - t) * log_q > target:
        R += 1
    return R


@dataclass(frozen=True)
class Cluster:
    center: int
    radius: int
    ball: tuple[int, ...]
    boundary: tuple[int, ...]

    def to_dict(self):
        return {"center": self.center, "radius": self.radius,
                "ball": list(self.ball), "boundary": list(self.boundary)}


@dataclass(frozen=True)
class ChopParams:
    k: int
    cap_R: int
    center_rule: str = "lowest"

    def __post_init__(self):
        if self.k < 4:
            raise InputError("k must be at least 4")
        if self.cap_R < 1:
            raise InputError("cap_R must be at least 1")
        if self.center_rule not in CENTER_RULES:
            raise InputError(f"unknown center rule {self.center_rule!r}")

    @classmethod
    def from_growth(cls, k, growth, cap_R=None, center_rule="lowest"):
        return cls(k, cap_R if cap_R is not None else compute_cap_R(k, growth), center_rule)

    @property
    def p(self) -> float:
        return 1.0 / self.k


@dataclass(frozen=True)
class ChopOutcome:
    retained: frozenset
    clusters: tuple[Cluster, ...]

    @property
    def discarded_boundaries(self):
        return [c.boundary for c in self.clusters]

    def to_dict(self):
        return {"retained": sorted(self.retained),
                "clusters": [c.to_dict() for c in self.clusters]}


@dataclass(frozen=True)
class SparsifyParams:
    k: int
    delta: int
    cap_Rprime: int
    p2: float
    portal_budget: int
    empty_guess_prob: float
    center_rule: str = "lowest"

    def __post_init__(self):
        if self.k < 4:
            raise InputError("k must be at least 4")
        if self.cap_Rprime < 1:
            raise InputError("cap_Rprime must be at least 1")
        if not 0.0 < self.p2 <= 1.0:
            raise InputError("p2 must lie in (0, 1]")
        if self.portal_budget < 1:
            raise InputError("portal_budget must be at least 1")
        if not 0.0 < self.empty_guess_prob < 1.0:
            raise InputError("empty_guess_prob must lie in (0, 1)")
        if self.center_rule not in CENTER_RULES:
            raise InputError(f"unknown center rule {self.center_rule!r}")

    @classmethod
    def for_component(cls, k, delta, n_component, cap_Rprime=None, center_rule="lowest"):
        if cap_Rprime is None:
            cap_Rprime = compute_cap_Rprime(k, delta, n_component)
        return cls(k=k, delta=delta, cap_Rprime=cap_Rprime,
                   p2=sparsify_acceptance(k, delta),
                   portal_budget=portal_budget(k, delta),
                   empty_guess_prob=1.0 - 1.0 / (k * n_component),
                   center_rule=center_rule)


@dataclass(frozen=True)
class SparsifyOutcome:
    carved: frozenset
    portals: frozenset
    retained: frozenset
    clusters: tuple[Cluster, ...]
    portal_trace: tuple[tuple[int, ...], ...]
    overflow: bool = False

    def to_dict(self):
        return {"carved": sorted(self.carved), "portals": sorted(self.portals),
                "retained": sorted(self.retained), "overflow": self.overflow,
                "clusters": [c.to_dict() for c in self.clusters],
                "portal_trace": [list(p) for p in self.portal_trace]}


class _AlivePool:
    """Alive vertices with O(1) removal, lowest-id or uniform center picks."""

    def __init__(self, n, vertices, rule, rng):
        self.alive = bytearray(n)
        self.order = sorted(vertices)
        for v in self.order:
            self.alive[v] = 1
        self.count = len(self.order)
        self.rule = rule
        self.rng = rng
        self._ptr = 0
        if rule == "random":
            self._items = list(self.order)
            self._pos = {v: i for i, v in enumerate(self._items)}

    def __bool__(self):
        return self.count > 0

    def pick(self):
        if self.rule == "lowest":
            while not self.alive[self.order[self._ptr]]:
                self._ptr += 1
            return self.order[self._ptr]
        return self._items[int(self.rng.integers(len(self._items)))]

    def remove(self, vs):
        for v in vs:
            self.alive[v] = 0
        self.count -= len(vs)
        if self.rule == "random":
            items, pos = self._items, self._pos
            for v in vs:
                i = pos.pop(v)
                last = items.pop()
                if i < len(items):
                    items[i] = last
                    pos[last] = i


def carve(g: Graph, vertices: Iterable[int], p: float, cap: int, rng,
          center_rule: str = "lowest") -> tuple[Cluster, ...]:
    """Carve ``g[vertices]`` into balls until nothing is left.

    Each iteration picks a center, draws a capped geometric radius ``r`` and
    removes the ball of radius ``r`` together with its boundary from the alive
    graph.
    """
    pool = _AlivePool(g.n, vertices, center_rule, rng)
    clusters = []
    while pool:
        v = pool.pick()
        r = sample_capped_geometric(p, cap, rng)
        inside, bnd = layers(g, v, r, pool.alive)
        pool.remove(inside)
        pool.remove(bnd)
        clusters.append(Cluster(v, r, tuple(sorted(inside)), tuple(sorted(bnd))))
    return tuple(clusters)


def chop(g: Graph, params: ChopParams, rng, vertices: Iterable[int] | None = None) -> ChopOutcome:
    verts = range(g.n) if vertices is None else vertices
    clusters = carve(g, verts, params.p, params.cap_R, rng, params.center_rule)
    retained = frozenset(v for c in clusters for v in c.ball)
    return ChopOutcome(retained, clusters)


def guess_portals(clusters, params: SparsifyParams, rng) -> tuple[tuple[int, ...], ...]:
    """Per iteration, keep nothing with probability ``empty_guess_prob``, else a
    uniform subset of ``min(l, |boundary|)`` boundary vertices, ``l`` uniform in
    ``1..portal_budget``."""
    trace = []
    for c in clusters:
        if rng.random() < params.empty_guess_prob:
            trace.append(())
            continue
        ell = int(rng.integers(1, params.portal_budget + 1))
        m = min(ell, len(c.boundary))
        if m == 0:
            trace.append(())
            continue
        picked = rng.choice(len(c.boundary), size=m, replace=False)
        trace.append(tuple(sorted(c.boundary[i] for i in picked)))
    return tuple(trace)


def sparsify(g: Graph, component: Iterable[int], params: SparsifyParams, rng) -> SparsifyOutcome:
    # carving never looks at the portal choices, so all radii are drawn first
    clusters = carve(g, component, params.p2, params.cap_Rprime, rng, params.center_rule)
    trace = guess_portals(clusters, params, rng)
    carved = frozenset(v for c in clusters for v in c.ball)
    portals = frozenset(v for p in trace for v in p)
    overflow = len(portals) > params.portal_budget
    retained = frozenset() if overflow else carved | portals
    return SparsifyOutcome(carved, portals, retained, clusters, trace, overflow)
