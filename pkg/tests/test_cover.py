import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patcover import rng as rngmod
from patcover.clustering import SparsifyParams, carve, guess_portals
from patcover.cover import (EliminationForest, Pattern, budget_exponent, build_elimination_forest,
                            conditional_coverage, cover_once, estimate_coverage, fit_constant,
                            merge_forests, plant_connected, plant_path, portal_cover_probability,
                            separator_forest, trial_budget)
from patcover.errors import InputError, ResourceError
from patcover.graph import Graph, GrowthBound, components, generate_grid, generate_perturbed_subgrid
from patcover.longpath import validate_path

GROWTH = GrowthBound(4, 2)


def test_forest_depth_and_ancestry():
    f = EliminationForest({0: None, 1: 0, 2: 1, 3: 0})
    assert f.depth == 3
    assert f.ancestors(2) == [0, 1]
    assert f.is_ancestor_related(2, 0) and not f.is_ancestor_related(2, 3)
    assert f.roots() == [0]


def test_forest_rejects_cycles():
    with pytest.raises(InputError):
        EliminationForest({0: 1, 1: 0})


def test_forest_violations_found():
    g = Graph(3, [(1, 2)])
    f = EliminationForest({0: None, 1: 0, 2: 0})
    assert f.violations(g) == [(1, 2)]


def test_merge_forests_rejects_overlap():
    a = EliminationForest({0: None})
    with pytest.raises(InputError):
        merge_forests([a, a])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(4, 10))
def test_cover_forest_is_valid(seed, k):
    g, _ = generate_perturbed_subgrid(2, 14, 0.2, np.random.default_rng(seed))
    if g.n == 0:
        return
    res = cover_once(g, k, GROWTH, seed, 0)
    assert res.forest.domain == res.retained
    assert res.forest.violations(g) == []
    assert res.forest.depth <= res.depth_bound()


def test_build_forest_hangs_components_under_portals():
    g, _ = generate_grid(2, 4)
    carved = {0, 1, 4, 15}
    portals = {5}
    f = build_elimination_forest(g, carved, portals)
    assert f.violations(g) == []
    assert f.depth_of(5) == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_separator_forest_is_valid(seed):
    g, _ = generate_perturbed_subgrid(2, 6, 0.2, np.random.default_rng(seed))
    f = separator_forest(g, range(g.n))
    assert f.violations(g) == []
    assert f.domain == frozenset(range(g.n))


def test_cover_is_reproducible():
    g, _ = generate_grid(2, 20)
    a = cover_once(g, 6, GROWTH, 5, 3)
    b = cover_once(g, 6, GROWTH, 5, 3)
    assert a.to_dict() == b.to_dict()
    c = cover_once(g, 6, GROWTH, 5, 4)
    assert a.to_dict() != c.to_dict()


def test_portal_probability_matches_sampling():
    g, _ = generate_grid(2, 7)
    params = SparsifyParams(k=6, delta=2, cap_Rprime=3, p2=0.5, portal_budget=4, empty_guess_prob=0.4)
    clusters = carve(g, range(g.n), params.p2, params.cap_Rprime, rngmod.stream(1, 0), "lowest")
    pattern = frozenset(clusters[0].boundary[:1]) | frozenset(clusters[1].ball[:1])
    exact = portal_cover_probability(clusters, pattern, params)
    hits = 0
    trials = 20_000
    for t in range(trials):
        trace = guess_portals(clusters, params, rngmod.stream(2, t))
        portals = {v for p in trace for v in p}
        carved = {v for c in clusters for v in c.ball}
        if len(portals) <= params.portal_budget and pattern <= carved | portals:
            hits += 1
    se = math.sqrt(exact * (1 - exact) / trials)
    assert abs(hits / trials - exact) < 4 * se + 1e-9
    assert 0 < exact < 1


def test_conditional_estimator_agrees_with_indicator():
    g, _ = generate_grid(2, 12)
    x = Pattern(frozenset([55, 56, 57, 67]), 4)
    p_ind, se_ind = estimate_coverage(g, x, GROWTH, 3000, seed=1, method="indicator")
    p_con, se_con = estimate_coverage(g, x, GROWTH, 3000, seed=1, method="conditional")
    # a floor on the tolerance covers the case where every indicator trial hits
    assert abs(p_ind - p_con) < 4 * math.hypot(se_ind, se_con) + 1e-3


def test_conditional_coverage_is_zero_when_chop_drops_pattern():
    g, _ = generate_grid(2, 10)
    for t in range(30):
        from patcover.cover import chop_once
        ch = chop_once(g, 4, GROWTH, 3, t)
        dropped = [v for v in range(g.n) if v not in ch.retained]
        if dropped:
            assert conditional_coverage(g, [dropped[0]], 4, GROWTH, 3, t) == 0.0
            return
    pytest.skip("every trial kept everything")


def test_estimate_parallel_matches_serial():
    g, _ = generate_grid(2, 10)
    x = Pattern(frozenset([0, 1]), 4)
    a = estimate_coverage(g, x, GROWTH, 40, seed=2, phase="chop", workers=1)
    b = estimate_coverage(g, x, GROWTH, 40, seed=2, phase="chop", workers=2)
    assert a == b


def test_estimate_validation():
    g, _ = generate_grid(2, 5)
    x = Pattern(frozenset([0]), 4)
    with pytest.raises(InputError):
        estimate_coverage(g, x, GROWTH, 0)
    with pytest.raises(InputError):
        estimate_coverage(g, x, GROWTH, 5, phase="bogus")
    with pytest.raises(InputError):
        Pattern(frozenset(range(5)), 4)


def test_budget_exponent_value():
    assert budget_exponent(8, 2) == pytest.approx(4 * 9)


def test_trial_budget_formula_and_ceiling():
    b = trial_budget(4, 2, 0.1, 1e-3)
    assert b == math.ceil(math.log(1000) * 2 ** (0.1 * budget_exponent(4, 2)) - 1e-9)
    assert trial_budget(4, 2, 0.1, 1e-6) > b
    with pytest.raises(ResourceError):
        trial_budget(8, 2, 0.9, 1e-3)
    with pytest.raises(InputError):
        trial_budget(8, 2, 0.0, 1e-3)
    with pytest.raises(InputError):
        trial_budget(8, 2, 0.5, 1.5)


def test_fit_constant_recovers_synthetic_slope():
    ks = list(range(4, 13))
    ps = [2.0 ** -(0.3 * budget_exponent(k, 2) + 1.5) for k in ks]
    fit = fit_constant(ks, ps, 2)
    assert fit.c_hat == pytest.approx(0.3)
    assert fit.intercept == pytest.approx(1.5)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(InputError):
        fit_constant([4, 5, 6], [0.1, 0.0, 0.01], 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12))
def test_planted_patterns(seed, size):
    g, _ = generate_grid(2, 10)
    rng = np.random.default_rng(seed)
    path = plant_path(g, size, rng)
    assert validate_path(g, path, size) == []
    conn = plant_connected(g, size, rng)
    assert len(conn) == size and len(components(g, conn)) == 1
