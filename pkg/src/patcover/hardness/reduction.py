"""CSP on a grid -> Hamiltonian path in a subgraph of the d-dimensional grid.

Every variable owns a cubic block of side ``spacing``.  Inside it sit
``lambda`` stacked 2-chains (chain ``i`` at height ``i``, one per value) wired
terminal to terminal, plus a tube on the first chunks.  The tube forces some
chain to run in high mode; OR-checks between every two chains of a variable
forbid two high chains.  A forbidden pair ``(a, b)`` on the constraint ``p q``
becomes an OR-check between chain ``a`` of ``p`` and chain ``b`` of ``q``.
OR-checks sit on low-mode edges, so a low chain can absorb them.

Corridors are routed by deterministic A* inside the blocks involved.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

from ..errors import InputError, LayoutError
from ..graph import Graph, GridEmbedding
from .csp import CspInstance, snake_order
from .gadgets import (CHUNK, HIGH, LOW, Lattice, apply_detours, attach_gadget_edge,
                      attach_or_check, build_tube, build_two_chain)

log = logging.getLogger(__name__)

SPACING_FACTOR = 16     # the construction constant kappa: spacing = kappa * d * lambda^2
MAX_EXPANSIONS = 1_000_000
CHAIN_X = 3             # local x offset of chain column 0 inside a block


def default_spacing(dimension: int, domain_size: int) -> int:
    return SPACING_FACTOR * dimension * domain_size ** 2


@dataclass
class ReductionOutput:
    graph: Graph
    embedding: GridEmbedding
    csp: CspInstance
    spacing: int
    order: list                 # variables along the wiring walk
    chains: dict                # variable -> list of TwoChain, index = value
    tubes: dict                 # variable -> Tube
    or_checks: list             # (kind, (var, value), (var, value), OrCheck)
    wiring: list                # corridor ids between consecutive variables
    lattice: Lattice = field(repr=False, default=None)

    def or_checks_per_variable(self) -> dict:
        counts = {p: 0 for p in self.order}
        for _, (p, _a), (q, _b), _oc in self.or_checks:
            counts[p] += 1
            if q != p:
                counts[q] += 1
        return counts

    def side_length(self) -> int:
        return self.embedding.side_length()

    def summary(self) -> dict:
        lengths = [oc.corridor_lengths for *_, oc in self.or_checks]
        return {
            "vertices": self.graph.n,
            "edges": self.graph.m,
            "dimension": self.embedding.dimension,
            "spacing": self.spacing,
            "side_length": self.side_length(),
            "side_bound": SPACING_FACTOR * self.csp.dimension * self.csp.domain_size ** 2 * self.csp.side,
            "chunks_per_chain": next(iter(self.chains.values()))[0].chunks,
            "or_checks": len(self.or_checks),
            "max_or_checks_per_variable": max(self.or_checks_per_variable().values(), default=0),
            "corridors_equal_length": sum(a == b for a, b in lengths),
            "corridors": len(lengths),
        }


class _Router:
    def __init__(self, lattice: Lattice, reserved: set):
        self.lattice = lattice
        self.reserved = reserved

    def route(self, a: int, b: int, lo, hi, release=()) -> list:
        """Free grid points strictly between vertices ``a`` and ``b``, inside ``[lo, hi)``."""
        lat = self.lattice
        start, goal = lat.coords[a], lat.coords[b]
        released = set(release)
        dim = lat.dimension

        def h(c):
            return sum(abs(x - y) for x, y in zip(c, goal))

        def free(c):
            if c in lat.index:
                return False
            if c in self.reserved and c not in released:
                return False
            return all(lo[i] <= c[i] < hi[i] for i in range(dim))

        counter = 0
        heap = [(h(start), 0, counter, start)]
        came = {start: None}
        best = {start: 0}
        expansions = 0
        while heap:
            f, g, _, cur = heapq.heappop(heap)
            if g > best.get(cur, g):
                continue
            expansions += 1
            if expansions > MAX_EXPANSIONS:
                break
            for i in range(dim):
                for step in (-1, 1):
                    nxt = cur[:i] + (cur[i] + step,) + cur[i + 1:]
                    if nxt == goal:
                        out = []
                        node = cur
                        while node != start:
                            out.append(node)
                            node = came[node]
                        return out[::-1]
                    if not free(nxt):
                        continue
                    ng = g + 1
                    if ng < best.get(nxt, ng + 1):
                        best[nxt] = ng
                        came[nxt] = cur
                        counter += 1
                        # prefer deeper nodes on ties so searches run straight
                        heapq.heappush(heap, (ng + h(nxt), -ng, counter, nxt))
        raise LayoutError(f"no corridor from {start} to {goal} inside the blocks; "
                          f"raise the spacing constant (currently {hi[0] - lo[0]} per block)")


def _escape(coord, axis, step):
    return coord[:axis] + (coord[axis] + step,) + coord[axis + 1:]


def reduce_csp(csp: CspInstance, spacing: int | None = None) -> ReductionOutput:
    if csp.dimension < 3:
        raise InputError("the reduction needs dimension >= 3")
    if csp.domain_size < 2:
        raise InputError("the reduction needs domain size >= 2")
    d, n, lam = csp.dimension, csp.side, csp.domain_size
    spacing = default_spacing(d, lam) if spacing is None else spacing
    order = snake_order(d, n)

    # OR-checks: at most one high chain per variable, and forbidden value pairs
    checks = []
    for p in order:
        for i in range(lam):
            for j in range(i + 1, lam):
                checks.append(("variable", (p, i), (p, j)))
    for (p, q) in csp.constraints:
        for a, b in csp.forbidden(p, q):
            checks.append(("constraint", (p, a), (q, b)))
    load = {}
    for _, x, y in checks:
        load[x] = load.get(x, 0) + 1
        load[y] = load.get(y, 0) + 1
    chunks = 1 + max(load.values(), default=0)
    length = CHUNK * chunks
    mid = spacing // 2
    z0 = mid - lam // 2
    need_x = CHAIN_X + length + 4
    if need_x > spacing or z0 < 2 or z0 + lam + 2 > spacing:
        raise LayoutError(f"chains of {chunks} chunks do not fit a block of side {spacing}; "
                          f"raise the spacing constant")

    lat = Lattice(d)

    def block_origin(p):
        return tuple(c * spacing for c in p)

    def local(p, x, y, z):
        o = block_origin(p)
        return (o[0] + CHAIN_X + x, o[1] + mid + y, o[2] + z0 + z) + tuple(c + mid for c in o[3:])

    chains, tubes = {}, {}
    for p in order:
        tube = build_tube(lam, lat, lambda i, j, z, p=p: local(p, 3 + j, -1 - i, z))
        tubes[p] = tube
        row = []
        for i in range(lam):
            ch = build_two_chain(chunks, lat, lambda x, y, p=p, i=i: local(p, x, y, i))
            att = attach_gadget_edge(ch, 0, HIGH, shared=True)
            assert (att.u, att.v) == tube.face(i)
            row.append(ch)
        for i in range(lam - 1):
            # chain i runs left to right when i is even
            end = 1 if i % 2 == 0 else 0
            lat.link(row[i].terminals[end], row[i + 1].terminals[end])
        chains[p] = row

    # every corridor endpoint keeps a straight shaft to the block edge free, so
    # earlier corridors can never seal it in
    shafts = {}

    def dig(w, var, axis, step):
        lo, hi = var[axis] * spacing, (var[axis] + 1) * spacing
        c = _escape(lat.coords[w], axis, step)
        cells = []
        while lo <= c[axis] < hi and c not in lat.index:
            cells.append(c)
            c = _escape(c, axis, step)
        shafts[w] = cells

    next_chunk = {}
    placed = []
    for kind, (p, a), (q, b) in checks:
        atts = []
        for var, val in ((p, a), (q, b)):
            c = next_chunk.get((var, val), 1)
            next_chunk[(var, val)] = c + 1
            atts.append(attach_gadget_edge(chains[var][val], c, LOW))
        placed.append((kind, (p, a), (q, b), atts))
    for kind, (p, _a), (q, _b), (att_a, att_b) in placed:
        for w, var in ((att_a.u, p), (att_a.v, p), (att_b.u, q), (att_b.v, q)):
            dig(w, var, 1, -1)
    entry, exit_ = {}, {}
    for p in order:
        row = chains[p]
        last = lam - 1
        entry[p] = row[0].terminals[0]
        exit_[p] = row[last].terminals[1 if last % 2 == 0 else 0]
        dig(entry[p], p, 2, -1)
        dig(exit_[p], p, 2, 1)
    reserved = {c for cells in shafts.values() for c in cells}
    router = _Router(lat, reserved)

    def box(*vars_):
        lo = [min(c * spacing for c in col) for col in zip(*vars_)]
        hi = [max((c + 1) * spacing for c in col) for col in zip(*vars_)]
        return lo, hi

    def corridor(a, b, lo, hi):
        own = shafts[a] + shafts[b]
        pts = router.route(a, b, lo, hi, release=own)
        reserved.difference_update(own)
        return pts

    or_checks = []
    for kind, x, y, (att_a, att_b) in placed:
        lo, hi = box(x[0], y[0])
        cu = corridor(att_a.u, att_b.u, lo, hi)
        reserved.update(cu)
        cv = corridor(att_a.v, att_b.v, lo, hi)
        reserved.difference_update(cu)
        or_checks.append((kind, x, y, attach_or_check(lat, att_a, att_b, cu, cv)))

    wiring = []
    for p, q in zip(order, order[1:]):
        a, b = exit_[p], entry[q]
        lo, hi = box(p, q)
        ids = [lat.add(c) for c in corridor(a, b, lo, hi)]
        lat.path([a, *ids, b])
        wiring.append(ids)

    g, emb = lat.graph()
    return ReductionOutput(g, emb, csp, spacing, order, chains, tubes, or_checks, wiring, lat)


def construct_witness_path(red: ReductionOutput, assignment: dict) -> list[int]:
    """Hamiltonian path of ``red.graph`` built from a satisfying assignment."""
    csp = red.csp
    bad = csp.violations(assignment)
    if bad:
        raise InputError(f"assignment violates {len(bad)} constraint(s), first {bad[0]}")
    for p in red.order:
        if not 0 <= assignment.get(p, -1) < csp.domain_size:
            raise InputError(f"variable {p} has no value in the domain")
    lam = csp.domain_size
    detours = {}
    for p in red.order:
        ch = red.chains[p][assignment[p]]
        att = ch.attachments[0]
        path = red.tubes[p].splice(assignment[p])
        detours[frozenset(att.edge)] = (att.s, path)
    for kind, (p, a), (q, b), oc in red.or_checks:
        # a chain that is not chosen runs low and absorbs the check
        if assignment[p] != a:
            s, t, inner = oc.detour("a")
        elif assignment[q] != b:
            s, t, inner = oc.detour("b")
        else:
            raise AssertionError("satisfying assignment left an OR-check without a low side")
        detours[frozenset((s, t))] = (s, inner)
    out = []
    for idx, p in enumerate(red.order):
        for i, ch in enumerate(red.chains[p]):
            mode = HIGH if assignment[p] == i else LOW
            out.extend(apply_detours(ch.mode_path(mode, forward=i % 2 == 0), detours))
        if idx < len(red.wiring):
            out.extend(red.wiring[idx])
    return out
