"""Exhaustive checks of the gadget properties on miniature instances."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .gadgets import (HIGH, LOW, Lattice, apply_detours, attach_gadget_edge, attach_or_check,
                      build_tube, build_two_chain, plane)
from .search import (brute_force_ham_cycle, enumerate_ham_paths, validate_ham_cycle,
                     validate_ham_path)


@dataclass
class ClaimResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _edge_set(path):
    return {frozenset(e) for e in zip(path, path[1:])}


def check_chain_modes(chunks: int) -> ClaimResult:
    ch = build_two_chain(chunks)
    g, emb = ch.lattice.graph()
    paths = enumerate_ham_paths(g, *ch.terminals)
    modes = {HIGH: ch.mode_edges(HIGH), LOW: ch.mode_edges(LOW)}
    matched = sorted(m for p in paths for m, es in modes.items() if _edge_set(p) == es)
    ok = not emb.validate(g) and len(paths) == 2 and matched == [HIGH, LOW]
    return ClaimResult(f"{chunks}-chunk chain modes", ok,
                       f"{len(paths)} terminal Hamiltonian paths, matching modes {matched}")


def classify(path, s, t, u, v) -> str:
    """How a traversal treats the attached edge ``s t`` with square ``s u v t``."""
    es = _edge_set(path)
    if frozenset((s, t)) in es:
        return "edge"
    if {frozenset((s, u)), frozenset((u, v)), frozenset((v, t))} <= es:
        return "detour"
    if u not in path and v not in path:
        return "skip"
    return "other"


def check_attachment(side: str) -> ClaimResult:
    ch = build_two_chain(1)
    att = attach_gadget_edge(ch, 0, side)
    g, emb = ch.lattice.graph()
    paths = enumerate_ham_paths(g, *ch.terminals, optional=[att.u, att.v])
    kinds = sorted(classify(p, att.s, att.t, att.u, att.v) for p in paths)
    ok = not emb.validate(g) and kinds == ["detour", "edge", "skip"]
    return ClaimResult(f"attachment on {side} edge", ok, f"{len(paths)} traversals: {kinds}")


def or_check_miniature():
    """Two 1-chunk chains at heights 0 and 2 joined by an OR-check on their low edges.

    The right terminals are wired through one vertex at height 1; a Hamiltonian
    path has to run from the left terminal of chain A to that of chain B.
    """
    lat = Lattice(3)
    a = build_two_chain(1, lat, plane(3, z=0))
    b = build_two_chain(1, lat, plane(3, z=2))
    att_a = attach_gadget_edge(a, 0, LOW)
    att_b = attach_gadget_edge(b, 0, LOW)
    x_u = lat.coords[att_a.u][0]
    corridor_u = [(x_u, -2, z) for z in range(3)]
    corridor_v = [(x_u + 1, -2, z) for z in range(3)]
    oc = attach_or_check(lat, att_a, att_b, corridor_u, corridor_v)
    n = a.length
    hub = lat.add((n, 1, 1))
    lat.path([a.terminals[1], hub, b.terminals[1]])
    return lat, a, b, oc, hub


def chain_mode(path, chain) -> str | None:
    """Mode of ``chain`` in ``path``, read off the first top and bottom edges."""
    es = _edge_set(path)
    c0, c1 = chain.cols[0], chain.cols[1]
    if frozenset((c0[0], c1[0])) in es:
        return LOW
    if frozenset((c0[2], c1[2])) in es:
        return HIGH
    return None


def check_or_check() -> ClaimResult:
    lat, a, b, oc, hub = or_check_miniature()
    g, emb = lat.graph()
    start, end = a.terminals[0], b.terminals[0]
    paths = enumerate_ham_paths(g, start, end)

    pairs = sorted((chain_mode(p, a) or "?", chain_mode(p, b) or "?") for p in paths)
    both_bad = [m for m in pairs if m == (HIGH, HIGH)]
    # the explicit reroutes: one chain low absorbing the check, the other high
    built = {}
    for through, low_chain in (("a", a), ("b", b)):
        s, t, inner = oc.detour(through)
        det = {frozenset((s, t)): (s, inner)}
        first = apply_detours(a.mode_path(LOW if low_chain is a else HIGH), det)
        second = apply_detours(b.mode_path(LOW if low_chain is b else HIGH, forward=False), det)
        built[through] = validate_ham_path(g, first + [hub] + second)
    ok = bool(not emb.validate(g) and not both_bad and pairs and all("?" not in m for m in pairs)
          and not built["a"] and not built["b"])
    return ClaimResult("OR-check miniature", ok,
                       f"{len(paths)} Hamiltonian paths with modes {pairs}, "
                       f"{len(both_bad)} with both chains inconsistent; "
                       f"A-consistent reroute {'valid' if not built['a'] else built['a']}, "
                       f"B-consistent reroute {'valid' if not built['b'] else built['b']}")


def check_tube(lam: int) -> ClaimResult:
    lat = Lattice(3)
    tube = build_tube(lam, lat)
    g, emb = lat.graph()
    problems = validate_ham_cycle(g, tube.cycle)
    splices = [not validate_ham_path(g, tube.splice(z)) for z in range(lam)]
    detail = f"cycle of length {len(tube.cycle)}"
    ok = not problems and all(splices) and len(tube.cycle) == 4 * lam and not emb.validate(g)
    if lam == 2:
        exhaustive = brute_force_ham_cycle(g) is not None
        detail += f", exhaustive search finds a cycle: {exhaustive}"
        ok = ok and exhaustive
    return ClaimResult(f"tube lambda={lam}", ok, detail + (f", {problems}" if problems else ""))


def verify_gadgets(lambdas=range(2, 7)) -> list[ClaimResult]:
    checks = [lambda: check_chain_modes(1), lambda: check_chain_modes(2),
              lambda: check_attachment(HIGH), lambda: check_attachment(LOW),
              check_or_check]
    checks += [lambda lam=lam: check_tube(lam) for lam in lambdas]
    out = []
    for fn in checks:
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out

