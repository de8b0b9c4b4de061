"""Grid gadgets: 2-chains, attachment squares, OR-checks and tubes.

All gadgets are built on a ``Lattice``, a growing subgraph of the integer
grid.  A chain lives in a plane with local coordinates ``(x, y)``:

* rows ``y = 0, 1, 2`` over main columns ``x = 0..N-1`` with ``N = 8 * chunks``;
  every vertical edge, and horizontal edges in rows 0 and 2 only;
* an endpoint gadget on each side, a 6-cycle on columns ``-2, -1`` (and
  ``N, N+1``) whose middle vertex ``(-1, 1)`` (``(N, 1)``) is the terminal;
* attachment squares on the ``y = -1`` side.

A Hamiltonian traversal of a chain is in one of two modes.  The high mode
uses the top edges ``(j, j+1)`` with ``j`` odd, the low mode those with ``j``
even.  Each chunk offers one middle top edge per mode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..errors import InputError, LayoutError
from ..graph import Graph, GridEmbedding

CHUNK = 8
HIGH, LOW = "high", "low"


class Lattice:
    """Vertices at distinct grid points; edges only between unit-distance points."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.coords: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self.edges: set[tuple[int, int]] = set()

    def add(self, coord) -> int:
        coord = tuple(coord)
        if len(coord) != self.dimension:
            raise LayoutError(f"{coord} is not a {self.dimension}-dimensional point")
        if coord in self.index:
            raise LayoutError(f"grid point {coord} is already occupied")
        self.index[coord] = len(self.coords)
        self.coords.append(coord)
        return self.index[coord]

    def ensure(self, coord) -> int:
        coord = tuple(coord)
        return self.index[coord] if coord in self.index else self.add(coord)

    def link(self, a: int, b: int) -> None:
        ca, cb = self.coords[a], self.coords[b]
        if sum(abs(x - y) for x, y in zip(ca, cb)) != 1:
            raise LayoutError(f"{ca} and {cb} are not grid neighbours")
        self.edges.add((min(a, b), max(a, b)))

    def path(self, ids: Sequence[int]) -> None:
        for a, b in zip(ids, ids[1:]):
            self.link(a, b)

    def has_edge(self, a, b) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def occupied(self, coord) -> bool:
        return tuple(coord) in self.index

    def graph(self) -> tuple[Graph, GridEmbedding]:
        return Graph(len(self.coords), sorted(self.edges)), GridEmbedding(self.dimension, tuple(self.coords))


def plane(dimension: int = 2, origin: Sequence[int] = (), z: int = 0) -> Callable:
    """Map local chain coordinates ``(x, y)`` to lattice points at height ``z``."""
    origin = tuple(origin) + (0,) * (dimension - len(origin))
    if dimension == 2:
        return lambda x, y: (origin[0] + x, origin[1] + y)
    return lambda x, y: (origin[0] + x, origin[1] + y, origin[2] + z) + origin[3:]


@dataclass
class Attachment:
    chain: "TwoChain"
    chunk: int
    side: str
    s: int
    t: int
    u: int
    v: int

    @property
    def edge(self):
        return (self.s, self.t)

    def detour(self):
        return [self.u, self.v]


@dataclass
class TwoChain:
    lattice: Lattice
    chunks: int
    place: Callable
    cols: list = field(default_factory=list)       # cols[j] = (top, mid, bottom)
    left: tuple = ()                                 # 6-cycle ids, terminal first
    right: tuple = ()
    attachments: dict = field(default_factory=dict)  # chunk -> Attachment

    @property
    def length(self) -> int:
        return CHUNK * self.chunks

    @property
    def terminals(self) -> tuple[int, int]:
        return self.left[0], self.right[0]

    def middle_edge(self, chunk: int, side: str) -> tuple[int, int]:
        """Columns of the chunk's middle top edge used by mode ``side``."""
        if side not in (HIGH, LOW):
            raise InputError(f"side must be {HIGH!r} or {LOW!r}")
        a = CHUNK * chunk + (3 if side == HIGH else 4)
        return a, a + 1

    def mode_edges(self, mode: str) -> set:
        p = self.mode_path(mode)
        return {frozenset(e) for e in zip(p, p[1:])}

    def mode_path(self, mode: str, forward: bool = True) -> list[int]:
        """Terminal-to-terminal Hamiltonian path of the bare chain in ``mode``."""
        lt, l_top, l_bot, l_fbot, l_fmid, l_ftop = self.left
        rt, r_top, r_bot, r_fbot, r_fmid, r_ftop = self.right
        n = self.length
        if mode == HIGH:
            path = [lt, l_bot, l_fbot, l_fmid, l_ftop, l_top]
        elif mode == LOW:
            path = [lt, l_top, l_ftop, l_fmid, l_fbot, l_bot]
        else:
            raise InputError(f"unknown mode {mode!r}")
        start_top = mode == HIGH
        for j in range(n):
            col = self.cols[j]
            down = (j % 2 == 0) == start_top
            path.extend(col if down else col[::-1])
        # column N-1 is odd, so high exits at the top and low at the bottom
        if mode == HIGH:
            path += [r_top, r_ftop, r_fmid, r_fbot, r_bot, rt]
        else:
            path += [r_bot, r_fbot, r_fmid, r_ftop, r_top, rt]
        return path if forward else path[::-1]


def build_two_chain(chunks: int, lattice: Lattice | None = None, place: Callable | None = None) -> TwoChain:
    if chunks < 1:
        raise InputError("a chain needs at least one chunk")
    if lattice is None:
        lattice = Lattice(2)
    if place is None:
        place = plane(lattice.dimension)
    ch = TwoChain(lattice, chunks, place)
    n = ch.length
    add = lambda x, y: lattice.add(place(x, y))
    ch.cols = [tuple(add(j, y) for y in range(3)) for j in range(n)]
    for j, col in enumerate(ch.cols):
        lattice.path(col)
        if j + 1 < n:
            lattice.link(col[0], ch.cols[j + 1][0])
            lattice.link(col[2], ch.cols[j + 1][2])

    def endpoint(inner, outer, neighbour_col):
        # terminal, its top and bottom cycle neighbours, then the far column bottom-up
        t = add(inner, 1)
        top, bot = add(inner, 0), add(inner, 2)
        fbot, fmid, ftop = add(outer, 2), add(outer, 1), add(outer, 0)
        lattice.path([top, t, bot, fbot, fmid, ftop, top])
        lattice.link(top, neighbour_col[0])
        lattice.link(bot, neighbour_col[2])
        return (t, top, bot, fbot, fmid, ftop)

    ch.left = endpoint(-1, -2, ch.cols[0])
    ch.right = endpoint(n, n + 1, ch.cols[n - 1])
    return ch


def attach_gadget_edge(chain: TwoChain, chunk: int, side: str, shared: bool = False) -> Attachment:
    """Square ``s, u, v, t`` on the chunk's middle top edge ``(s, t)`` for mode ``side``.

    With ``shared`` the square corners may already exist (a tube provides them).
    """
    if not 0 <= chunk < chain.chunks:
        raise InputError(f"chunk {chunk} outside 0..{chain.chunks - 1}")
    if chunk in chain.attachments:
        raise InputError(f"chunk {chunk} already carries an attachment")
    a, b = chain.middle_edge(chunk, side)
    lat = chain.lattice
    make = lat.ensure if shared else lat.add
    s, t = chain.cols[a][0], chain.cols[b][0]
    u, v = make(chain.place(a, -1)), make(chain.place(b, -1))
    lat.path([s, u, v, t])
    att = Attachment(chain, chunk, side, s, t, u, v)
    chain.attachments[chunk] = att
    return att


@dataclass
class OrCheck:
    a: Attachment
    b: Attachment
    corridor_u: list   # ids strictly between u_a and u_b
    corridor_v: list   # ids strictly between v_a and v_b

    def detour(self, through: str) -> tuple[int, int, list[int]]:
        """``(s, t, inner)``: replace edge ``s t`` of the absorbing chain by ``s, *inner, t``."""
        a, b = self.a, self.b
        if through == "a":
            inner = [a.u, *self.corridor_u, b.u, b.v, *reversed(self.corridor_v), a.v]
            return a.s, a.t, inner
        if through == "b":
            inner = [b.u, *reversed(self.corridor_u), a.u, a.v, *self.corridor_v, b.v]
            return b.s, b.t, inner
        raise InputError("through must be 'a' or 'b'")

    @property
    def corridor_lengths(self) -> tuple[int, int]:
        return len(self.corridor_u) + 1, len(self.corridor_v) + 1


def attach_or_check(lattice: Lattice, a: Attachment, b: Attachment,
                    corridor_u: Sequence, corridor_v: Sequence) -> OrCheck:
    """Wire ``u_a .. u_b`` and ``v_a .. v_b`` through new vertices at the given points."""
    if a.side != b.side:
        raise InputError("both attachments must sit on edges of the same mode")
    ids_u = [lattice.add(c) for c in corridor_u]
    ids_v = [lattice.add(c) for c in corridor_v]
    lattice.path([a.u, *ids_u, b.u])
    lattice.path([a.v, *ids_v, b.v])
    # the square edges stay; the corridor detour replaces them in a consistent traversal
    return OrCheck(a, b, ids_u, ids_v)


@dataclass
class Tube:
    lam: int
    ids: dict         # (i, j, z) -> vertex, i = 0 for the A/B face, j = 0 for A/C
    cycle: list

    def face(self, z):
        return self.ids[(0, 0, z)], self.ids[(0, 1, z)]

    def splice(self, z: int) -> list[int]:
        """Hamiltonian path of the tube from ``A_z`` to ``B_z`` (the cycle minus edge ``A_z B_z``)."""
        a, b = self.face(z)
        n = len(self.cycle)
        i = self.cycle.index(a)
        step = 1 if self.cycle[(i - 1) % n] == b else -1
        if self.cycle[(i - step) % n] != b:
            raise LayoutError(f"edge A_{z} B_{z} is not on the tube cycle")
        return [self.cycle[(i + step * m) % n] for m in range(n)]


def tube_cycle_coords(lam: int) -> list[tuple[int, int, int]]:
    """Canonical Hamiltonian cycle of the ``2 x 2 x lam`` grid as ``(i, j, z)`` points.

    Zigzags up the ``i = 0`` face through every rung ``(0,0,z)-(0,1,z)``, then
    back down the ``i = 1`` face to the start.
    """
    if lam < 2:
        raise InputError("tube needs lambda >= 2")
    out = []
    for z in range(lam):
        out += [(0, 0, z), (0, 1, z)] if z % 2 == 0 else [(0, 1, z), (0, 0, z)]
    j = out[-1][1]
    for z in reversed(range(lam)):
        out += [(1, j, z), (1, 1 - j, z)]
        j = 1 - j
    return out


def build_tube(lam: int, lattice: Lattice | None = None, place: Callable | None = None) -> Tube:
    """``place(i, j, z)`` maps tube indices to lattice points."""
    if lam < 2:
        raise InputError("tube needs lambda >= 2")
    if lattice is None:
        lattice = Lattice(3)
    if place is None:
        place = lambda i, j, z: (i, j, z)
    ids = {}
    for z in range(lam):
        for i in (0, 1):
            for j in (0, 1):
                ids[(i, j, z)] = lattice.ensure(place(i, j, z))
    for (i, j, z), v in ids.items():
        for nb in ((1 - i, j, z), (i, 1 - j, z), (i, j, z + 1)):
            if nb in ids:
                lattice.link(v, ids[nb])
    cycle = [ids[c] for c in tube_cycle_coords(lam)]
    return Tube(lam, ids, cycle)


def apply_detours(path: Sequence[int], detours: dict) -> list[int]:
    """Replace each consecutive pair ``s t`` keyed in ``detours`` by its inner run."""
    out = [path[0]]
    for x, y in zip(path, path[1:]):
        hit = detours.get(frozenset((x, y)))
        if hit is not None:
            s, inner = hit
            out.extend(inner if x == s else reversed(inner))
        out.append(y)
    return out
