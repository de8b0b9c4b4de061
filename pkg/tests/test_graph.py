import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patcover.errors import InputError, ParseError, ResourceError
from patcover.graph import (UNREACHABLE, Graph, GridEmbedding, GrowthBound, ball, bfs_distances,
                            boundary, check_growth, components, empirical_growth_constant,
                            generate_grid, generate_perturbed_subgrid, induced, layers, path_graph)
from patcover.io import (DuplicateEdgeWarning, format_edge_list, load_graph, parse_edge_list,
                         parse_embedding, save_graph)


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, edges)


def floyd_warshall(g):
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(g.n)] for i in range(g.n)]
    for u, v in g.edges():
        d[u][v] = d[v][u] = 1
    for k in range(g.n):
        for i in range(g.n):
            for j in range(g.n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def union_find_components(g, restrict):
    parent = {v: v for v in restrict}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        if u in parent and v in parent:
            parent[find(u)] = find(v)
    groups = {}
    for v in restrict:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)


def test_graph_rejects_bad_edges():
    with pytest.raises(InputError):
        Graph(3, [(0, 0)])
    with pytest.raises(InputError):
        Graph(3, [(0, 3)])


def test_graph_deduplicates_and_sorts():
    g = Graph(4, [(2, 1), (1, 2), (0, 3)])
    assert g.m == 2
    assert list(g.edges()) == [(0, 3), (1, 2)]
    assert g.has_edge(2, 1) and not g.has_edge(0, 1)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_bfs_matches_floyd_warshall(g, data):
    d = floyd_warshall(g)
    v = data.draw(st.integers(0, g.n - 1))
    got = bfs_distances(g, v)
    for w in range(g.n):
        expected = UNREACHABLE if d[v][w] == float("inf") else d[v][w]
        assert got[w] == expected


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_ball_and_boundary_definitions(g, data):
    d = floyd_warshall(g)
    v = data.draw(st.integers(0, g.n - 1))
    r = data.draw(st.integers(1, 5))
    assert ball(g, v, r) == {w for w in range(g.n) if d[v][w] < r}
    assert boundary(g, v, r) == {w for w in range(g.n) if d[v][w] == r}


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_layers_respect_alive_mask(g, data):
    alive_set = set(data.draw(st.lists(st.integers(0, g.n - 1), unique=True, min_size=1)))
    v = sorted(alive_set)[0]
    alive = bytearray(g.n)
    for w in alive_set:
        alive[w] = 1
    inside, bnd = layers(g, v, 3, alive)
    sub, old = induced(g, alive_set)
    d = bfs_distances(sub, old.index(v))
    assert set(inside) == {old[i] for i, x in enumerate(d) if x != UNREACHABLE and x < 3}
    assert set(bnd) == {old[i] for i, x in enumerate(d) if x == 3}


def test_radius_must_be_positive():
    g = path_graph(3)
    with pytest.raises(InputError):
        ball(g, 0, 0)
    with pytest.raises(InputError):
        boundary(g, 0, -1)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_components_match_union_find(g, data):
    restrict = set(data.draw(st.lists(st.integers(0, g.n - 1), unique=True)))
    assert components(g, restrict) == union_find_components(g, restrict)


@pytest.mark.parametrize("delta,side", [(1, 5), (2, 3), (2, 7), (3, 4)])
def test_grid_edge_count(delta, side):
    g, emb = generate_grid(delta, side)
    assert g.n == side ** delta
    assert g.m == delta * side ** (delta - 1) * (side - 1)
    assert emb.validate(g) == []
    assert emb.side_length() == side


def test_grid_resource_ceiling():
    with pytest.raises(ResourceError):
        generate_grid(3, 1000, max_vertices=10 ** 6)


def test_perturbed_subgrid_is_embedded():
    g, emb = generate_perturbed_subgrid(2, 12, 0.3, np.random.default_rng(3))
    assert emb.validate(g) == []
    assert g.n < 144


def test_embedding_validator_flags_long_edges():
    g = Graph(2, [(0, 1)])
    emb = GridEmbedding(2, ((0, 0), (1, 1)))
    assert emb.validate(g)


def test_growth_check_on_grid():
    g, _ = generate_grid(2, 10)
    assert check_growth(g, GrowthBound(4, 2)) == []
    # a tight constant must fail at r = 1 (ball of radius 1 is the vertex itself)
    assert check_growth(g, GrowthBound(0.5, 2))
    c = empirical_growth_constant(g, 2)
    assert check_growth(g, GrowthBound(c, 2)) == []
    assert check_growth(g, GrowthBound(c * 0.99, 2))


def test_growth_bound_validation():
    with pytest.raises(InputError):
        GrowthBound(0, 2)
    with pytest.raises(InputError):
        GrowthBound(1, 0)


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_edge_list_roundtrip(g):
    assert parse_edge_list(format_edge_list(g)) == g


def test_parse_edge_list_comments_and_duplicates():
    text = "# hi\np 4 2\n0 1\n1 0  # again\n2 3\n"
    with pytest.warns(DuplicateEdgeWarning):
        g = parse_edge_list(text)
    assert g.n == 4 and g.m == 2


def test_parse_edge_list_without_header():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        g = parse_edge_list("0 1\n1 5\n")
    assert g.n == 6


@pytest.mark.parametrize("text,line", [
    ("p 3 1\n0 x\n", 2),
    ("0 1\np 3 1\n", 2),
    ("p 3 1\n0 3\n", 2),
    ("1 1\n", 1),
    ("0 1 2\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_edge_list(text)
    assert exc.value.line == line


def test_embedding_sidecar_roundtrip(tmp_path):
    g, emb = generate_grid(2, 4)
    path = tmp_path / "g.txt"
    save_graph(path, g, emb)
    g2, emb2 = load_graph(path)
    assert g2 == g and emb2 == emb
    with pytest.raises(ParseError):
        parse_embedding("0 0 0\n0 1 1\n")


def test_induced_reindexes():
    g = path_graph(5)
    sub, old = induced(g, [4, 2, 3])
    assert old == [2, 3, 4]
    assert list(sub.edges()) == [(0, 1), (1, 2)]


def test_grid_points_are_lexicographic():
    _, emb = generate_grid(2, 3)
    assert list(emb.coords) == list(itertools.product(range(3), repeat=2))
