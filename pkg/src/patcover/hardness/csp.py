"""Binary CSPs whose constraint graph is a d-dimensional grid.

Text format::

    csp <dimension> <side> <domain_size>
    0 0 0 | 1 0 0 | 0,1 1,0
    ...

Each constraint line names two grid-adjacent variables by coordinates and
lists the allowed value pairs ``a,b`` (value ``a`` for the first variable).
An empty pair list means nothing is allowed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import InputError, ParseError, ResourceError

BRUTE_FORCE_LIMIT = 10**6

Coord = tuple


def snake_order(dimension: int, side: int) -> list[Coord]:
    """Boustrophedon walk of ``{0..side-1}^dimension``; consecutive points differ by one step."""
    if dimension == 1:
        return [(i,) for i in range(side)]
    sub = snake_order(dimension - 1, side)
    out = []
    for i in range(side):
        out.extend((i,) + s for s in (sub if i % 2 == 0 else reversed(sub)))
    return out


@dataclass
class CspInstance:
    dimension: int
    side: int
    domain_size: int
    constraints: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1 or self.side < 1 or self.domain_size < 1:
            raise InputError("dimension, side and domain size must be positive")
        normalized = {}
        for (u, v), rel in self.constraints.items():
            u, v = tuple(u), tuple(v)
            for c in (u, v):
                if len(c) != self.dimension or any(not 0 <= x < self.side for x in c):
                    raise InputError(f"variable {c} is not a grid point")
            if sum(abs(a - b) for a, b in zip(u, v)) != 1:
                raise InputError(f"constraint {u}-{v} is not between grid neighbours")
            rel = {(int(a), int(b)) for a, b in rel}
            if any(not (0 <= a < self.domain_size and 0 <= b < self.domain_size) for a, b in rel):
                raise InputError(f"constraint {u}-{v} uses values outside the domain")
            if v < u:
                u, v = v, u
                rel = {(b, a) for a, b in rel}
            if (u, v) in normalized:
                normalized[(u, v)] &= rel
            else:
                normalized[(u, v)] = rel
        self.constraints = {key: frozenset(rel) for key, rel in sorted(normalized.items())}

    def variables(self) -> list[Coord]:
        return list(itertools.product(range(self.side), repeat=self.dimension))

    def forbidden(self, u, v) -> list[tuple[int, int]]:
        rel = self.constraints[(u, v)]
        return [(a, b) for a in range(self.domain_size) for b in range(self.domain_size)
                if (a, b) not in rel]

    def violations(self, assignment: dict) -> list[tuple]:
        bad = []
        for (u, v), rel in self.constraints.items():
            if u not in assignment or v not in assignment:
                bad.append((u, v))
            elif (assignment[u], assignment[v]) not in rel:
                bad.append((u, v))
        return bad

    def is_satisfied_by(self, assignment: dict) -> bool:
        return not self.violations(assignment)


def parse_csp(text: str) -> CspInstance:
    header = None
    constraints = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            tok = line.split()
            if len(tok) != 4 or tok[0] != "csp":
                raise ParseError("header must read 'csp <dimension> <side> <domain_size>'", lineno)
            try:
                header = tuple(int(t) for t in tok[1:])
            except ValueError:
                raise ParseError("non-integer header field", lineno) from None
            continue
        parts = line.split("|")
        if len(parts) != 3:
            raise ParseError("constraint must read 'u-coords | v-coords | pairs'", lineno)
        try:
            u = tuple(int(t) for t in parts[0].split())
            v = tuple(int(t) for t in parts[1].split())
            pairs = set()
            for tok in parts[2].split():
                a, b = tok.split(",")
                pairs.add((int(a), int(b)))
        except ValueError:
            raise ParseError("malformed constraint", lineno) from None
        key = (u, v)
        if key in constraints:
            constraints[key] &= pairs
        else:
            constraints[key] = pairs
    if header is None:
        raise ParseError("missing csp header")
    try:
        return CspInstance(*header, constraints=constraints)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def format_csp(csp: CspInstance) -> str:
    lines = [f"csp {csp.dimension} {csp.side} {csp.domain_size}"]
    for (u, v), rel in csp.constraints.items():
        pairs = " ".join(f"{a},{b}" for a, b in sorted(rel))
        lines.append(f"{' '.join(map(str, u))} | {' '.join(map(str, v))} | {pairs}".rstrip())
    return "\n".join(lines) + "\n"


def brute_force_csp(csp: CspInstance, limit: int = BRUTE_FORCE_LIMIT) -> dict | None:
    """A satisfying assignment found by exhaustive enumeration, or ``None``."""
    variables = csp.variables()
    if csp.domain_size ** len(variables) > limit:
        raise ResourceError(f"{csp.domain_size}^{len(variables)} assignments exceed the limit {limit}")
    for values in itertools.product(range(csp.domain_size), repeat=len(variables)):
        assignment = dict(zip(variables, values))
        if csp.is_satisfied_by(assignment):
            return assignment
    return None


def random_csp(dimension: int, side: int, domain_size: int, rng, density: float = 0.5,
               planted: dict | None = None) -> CspInstance:
    """Constraint on every grid edge; each pair is allowed with probability ``density``.

    With ``planted`` the pair it uses is always allowed, so the instance is satisfiable.
    """
    csp = CspInstance(dimension, side, domain_size)
    constraints = {}
    for u in csp.variables():
        for axis in range(dimension):
            if u[axis] + 1 < side:
                v = u[:axis] + (u[axis] + 1,) + u[axis + 1:]
                rel = {(a, b) for a in range(domain_size) for b in range(domain_size)
                       if rng.random() < density}
                if planted is not None:
                    rel.add((planted[u], planted[v]))
                constraints[(u, v)] = rel
    return CspInstance(dimension, side, domain_size, constraints)
