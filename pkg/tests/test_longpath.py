import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patcover.cover import EliminationForest, separator_forest
from patcover.errors import InputError, ResourceError
from patcover.graph import Graph, GrowthBound, generate_grid, generate_perturbed_subgrid, path_graph
from patcover.longpath import (brute_force_long_path, dp_long_path, short_path, solve_long_path,
                               validate_path)


def chain_forest(vertices):
    order = sorted(vertices)
    return EliminationForest({v: (order[i - 1] if i else None) for i, v in enumerate(order)})


def test_validate_path():
    g = path_graph(4)
    assert validate_path(g, [0, 1, 2], 3) == []
    assert validate_path(g, [0, 2])
    assert validate_path(g, [0, 1, 0])
    assert validate_path(g, [0, 1], within=[0])


def test_brute_force_basics():
    g = path_graph(5)
    assert brute_force_long_path(g, None, 5) == [0, 1, 2, 3, 4]
    assert brute_force_long_path(g, None, 6) is None
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert brute_force_long_path(star, None, 4) is None
    assert len(brute_force_long_path(star, None, 3)) == 3
    with pytest.raises(ResourceError):
        brute_force_long_path(path_graph(40), None, 3)


def test_short_path():
    assert short_path(Graph(3), 2) is None
    assert short_path(path_graph(2), 2) == [0, 1]
    assert validate_path(path_graph(5), short_path(path_graph(5), 3), 3) == []
    with pytest.raises(InputError):
        short_path(path_graph(5), 4)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 11))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=18)) if pairs else []
    return Graph(n, edges)


@settings(max_examples=80, deadline=None)
@given(small_graphs(), st.integers(1, 11), st.booleans())
def test_dp_matches_brute_force(g, k, use_separator):
    forest = separator_forest(g, range(g.n)) if use_separator else chain_forest(range(g.n))
    got = dp_long_path(g, forest, k)
    want = brute_force_long_path(g, None, k)
    assert (got is None) == (want is None)
    if got is not None:
        assert validate_path(g, got, k) == []


def test_dp_respects_domain():
    g = path_graph(6)
    forest = chain_forest([0, 1, 2, 4, 5])
    assert dp_long_path(g, forest, 3) is not None
    assert dp_long_path(g, forest, 4) is None


def test_dp_on_subgrids(small_subgrids):
    for g in small_subgrids[:10]:
        f = separator_forest(g, range(g.n))
        for k in (4, 8, 12):
            got = dp_long_path(g, f, k)
            assert (got is None) == (brute_force_long_path(g, None, k) is None)


def test_solver_finds_path_on_grid():
    g, _ = generate_grid(2, 8)
    path = solve_long_path(g, 4, GrowthBound(4, 2), trials=50, seed=1)
    assert path is not None and validate_path(g, path, 4) == []


def test_solver_reports_absence():
    g = path_graph(5)
    assert solve_long_path(g, 6, GrowthBound(4, 1), trials=5) is None


def test_solver_small_k_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert solve_long_path(path_graph(3), 3, GrowthBound(4, 1), trials=1) is not None
    assert "k=3" in caplog.text


def test_solver_rejects_nonpositive_k():
    with pytest.raises(InputError):
        solve_long_path(path_graph(3), 0, GrowthBound(4, 1), trials=1)


def test_solver_is_deterministic():
    g, _ = generate_perturbed_subgrid(2, 10, 0.2, np.random.default_rng(4))
    a = solve_long_path(g, 5, GrowthBound(4, 2), trials=30, seed=9)
    b = solve_long_path(g, 5, GrowthBound(4, 2), trials=30, seed=9)
    assert a == b
