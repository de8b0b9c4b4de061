"""Edge-list and embedding sidecar text formats.

Edge list::

    # comment
    p <n> <m>
    u v
    ...

Vertices are 0-based.  Without a ``p`` header the vertex count is one more
than the largest id seen.  Duplicate edges (in either orientation) are
dropped with a warning.

Embedding sidecar: one line ``v x1 ... xd`` per vertex.
"""
from __future__ import annotations

import warnings
from pathlib import Path

from .errors import ParseError
from .graph import Graph, GridEmbedding


class DuplicateEdgeWarning(UserWarning):
    pass


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_edge_list(text: str) -> Graph:
    n = None
    declared_m = None
    edges = []
    seen = set()
    duplicates = 0
    max_id = -1
    for lineno, line in _data_lines(text):
        tokens = line.split()
        if tokens[0] == "p":
            if n is not None or edges:
                raise ParseError("header must come first and only once", lineno)
            if len(tokens) != 3:
                raise ParseError("header must read 'p <n> <m>'", lineno)
            n, declared_m = _ints(tokens[1:], lineno)
            if n < 0 or declared_m < 0:
                raise ParseError("negative counts in header", lineno)
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", lineno)
        u, v = _ints(tokens, lineno)
        if u < 0 or v < 0:
            raise ParseError("negative vertex id", lineno)
        if u == v:
            raise ParseError(f"self-loop at {u}", lineno)
        if n is not None and max(u, v) >= n:
            raise ParseError(f"vertex id {max(u, v)} exceeds declared n={n}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)
        max_id = max(max_id, u, v)
    if duplicates:
        warnings.warn(f"dropped {duplicates} duplicate edge(s)", DuplicateEdgeWarning, stacklevel=3)
    if n is None:
        n = max_id + 1
    return Graph(n, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_embedding(text: str, n: int | None = None) -> GridEmbedding:
    rows = {}
    dim = None
    for lineno, line in _data_lines(text):
        values = _ints(line.split(), lineno)
        if len(values) < 2:
            raise ParseError("expected 'v x1 ... xd'", lineno)
        v, coord = values[0], tuple(values[1:])
        if dim is None:
            dim = len(coord)
        elif len(coord) != dim:
            raise ParseError(f"expected {dim} coordinates, got {len(coord)}", lineno)
        if v in rows:
            raise ParseError(f"vertex {v} listed twice", lineno)
        rows[v] = coord
    count = len(rows) if n is None else n
    missing = [v for v in range(count) if v not in rows]
    if missing or len(rows) != count:
        raise ParseError(f"embedding must list vertices 0..{count - 1} exactly once")
    return GridEmbedding(dim or 1, tuple(rows[v] for v in range(count)))


def format_embedding(emb: GridEmbedding) -> str:
    return "".join(f"{v} {' '.join(map(str, c))}\n" for v, c in enumerate(emb.coords))


def embedding_path(graph_path) -> Path:
    p = Path(graph_path)
    return p.with_name(p.name + ".emb")


def save_graph(path, g: Graph, embedding: GridEmbedding | None = None) -> None:
    Path(path).write_text(format_edge_list(g))
    if embedding is not None:
        embedding_path(path).write_text(format_embedding(embedding))


def load_graph(path, with_embedding: bool = True):
    """Load ``(graph, embedding-or-None)``; the sidecar is ``<path>.emb`` when present."""
    g = parse_edge_list(Path(path).read_text())
    emb = None
    side = embedding_path(path)
    if with_embedding and side.exists():
        emb = parse_embedding(side.read_text(), g.n)
    return g, emb
