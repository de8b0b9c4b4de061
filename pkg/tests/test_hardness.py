import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patcover.errors import InputError, LayoutError, ParseError, ResourceError
from patcover.graph import Graph, path_graph
from patcover.hardness import (CspInstance, attach_gadget_edge, brute_force_csp, brute_force_ham_cycle,
                               brute_force_ham_path, build_tube, build_two_chain,
                               construct_witness_path, enumerate_ham_paths, format_csp, parse_csp,
                               random_csp, reduce_csp, snake_order, validate_ham_cycle,
                               validate_ham_path, verify_gadgets)
from patcover.hardness.claims import check_or_check, check_tube
from patcover.hardness.gadgets import HIGH, LOW, Lattice, apply_detours
from patcover.hardness.reduction import SPACING_FACTOR


# ---- Hamiltonian search ---------------------------------------------------

def test_small_hamiltonian_examples():
    assert brute_force_ham_path(path_graph(3)) in ([0, 1, 2], [2, 1, 0])
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert brute_force_ham_path(star) is None
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert validate_ham_path(c4, brute_force_ham_path(c4)) == []
    assert validate_ham_cycle(c4, brute_force_ham_cycle(c4)) == []
    assert brute_force_ham_cycle(path_graph(4)) is None
    with pytest.raises(ResourceError):
        brute_force_ham_path(path_graph(31))


def test_validators_flag_problems():
    g = path_graph(3)
    assert validate_ham_path(g, [0, 1])
    assert validate_ham_path(g, [0, 2, 1])
    assert validate_ham_path(g, [0, 1, 1])
    assert validate_ham_cycle(g, [0, 1, 2])


def test_enumeration_with_optional_vertices():
    # square 0-1-2-3 with a pendant-free optional vertex 4 on edge 1-2
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 2)])
    paths = enumerate_ham_paths(g, 0, 3, optional=[4])
    assert sorted(map(tuple, paths)) == [(0, 1, 2, 3), (0, 1, 4, 2, 3)]


@st.composite
def tiny_graphs(draw):
    n = draw(st.integers(1, 7))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, edges)


def permutation_oracle(g):
    import itertools
    for perm in itertools.permutations(range(g.n)):
        if all(g.has_edge(a, b) for a, b in zip(perm, perm[1:])):
            return True
    return False


@settings(max_examples=60, deadline=None)
@given(tiny_graphs())
def test_ham_path_matches_permutation_oracle(g):
    got = brute_force_ham_path(g)
    assert (got is not None) == permutation_oracle(g)
    if got is not None:
        assert validate_ham_path(g, got) == []


# ---- CSP ------------------------------------------------------------------

@pytest.mark.parametrize("d,n", [(1, 4), (2, 3), (3, 2), (3, 3)])
def test_snake_order_is_a_walk(d, n):
    order = snake_order(d, n)
    assert len(order) == n ** d and len(set(order)) == n ** d
    for a, b in zip(order, order[1:]):
        assert sum(abs(x - y) for x, y in zip(a, b)) == 1


def test_csp_examples():
    free = CspInstance(2, 2, 2)
    assert free.is_satisfied_by(brute_force_csp(free))
    dead = CspInstance(2, 2, 2, {((0, 0), (0, 1)): set()})
    assert brute_force_csp(dead) is None
    xor = {(0, 1), (1, 0)}
    ring = CspInstance(1, 3, 2, {((0,), (1,)): xor, ((1,), (2,)): xor})
    sol = brute_force_csp(ring)
    assert sol[(0,)] != sol[(1,)] != sol[(2,)]


def test_csp_normalizes_reversed_keys():
    csp = CspInstance(1, 2, 2, {((1,), (0,)): {(0, 1)}})
    assert csp.constraints == {((0,), (1,)): frozenset({(1, 0)})}
    assert csp.forbidden((0,), (1,)) == [(0, 0), (0, 1), (1, 1)]


@pytest.mark.parametrize("bad", [
    {((0, 0), (1, 1)): set()},
    {((0, 0), (0, 5)): set()},
    {((0, 0), (0, 1)): {(0, 7)}},
])
def test_csp_validation(bad):
    with pytest.raises(InputError):
        CspInstance(2, 3, 2, bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_csp_text_roundtrip(seed, d, n, lam):
    csp = random_csp(d, n, lam, np.random.default_rng(seed))
    assert parse_csp(format_csp(csp)) == csp


@pytest.mark.parametrize("text", ["", "csp 2 2\n", "csp 1 2 2\n0 | 1\n", "csp 1 2 2\n0 | 2 | 0,0\n",
                                  "csp 1 2 2\n0 | 1 | 0;0\n"])
def test_csp_parse_errors(text):
    with pytest.raises(ParseError):
        parse_csp(text)


def test_random_csp_plants_solution():
    rng = np.random.default_rng(1)
    planted = {v: int(rng.integers(3)) for v in CspInstance(2, 3, 3).variables()}
    csp = random_csp(2, 3, 3, rng, density=0.1, planted=planted)
    assert csp.is_satisfied_by(planted)


# ---- gadgets --------------------------------------------------------------

def test_all_gadget_claims_pass():
    results = verify_gadgets(range(2, 5))
    assert all(r.ok for r in results), [r.line() for r in results if not r.ok]


def test_chain_mode_paths_are_hamiltonian():
    ch = build_two_chain(2)
    g, emb = ch.lattice.graph()
    assert emb.validate(g) == []
    for mode in (HIGH, LOW):
        for forward in (True, False):
            p = ch.mode_path(mode, forward)
            assert validate_ham_path(g, p) == []
            assert {p[0], p[-1]} == set(ch.terminals)


def test_second_attachment_on_a_chunk_is_rejected():
    ch = build_two_chain(1)
    attach_gadget_edge(ch, 0, HIGH)
    with pytest.raises(InputError):
        attach_gadget_edge(ch, 0, LOW)
    with pytest.raises(InputError):
        attach_gadget_edge(ch, 3, LOW)


def test_detour_through_attachment():
    ch = build_two_chain(1)
    att = attach_gadget_edge(ch, 0, HIGH)
    g, _ = ch.lattice.graph()
    path = apply_detours(ch.mode_path(HIGH), {frozenset(att.edge): (att.s, att.detour())})
    assert validate_ham_path(g, path) == []


def test_or_check_and_tube_claims():
    assert check_or_check().ok
    for lam in (2, 3, 7):
        assert check_tube(lam).ok


def test_tube_splice_covers_tube():
    lat = Lattice(3)
    t = build_tube(4, lat)
    g, _ = lat.graph()
    for z in range(4):
        p = t.splice(z)
        assert validate_ham_path(g, p) == []
        assert (p[0], p[-1]) == t.face(z)


# ---- reduction ------------------------------------------------------------

def witness_ok(csp, spacing=None):
    red = reduce_csp(csp, spacing)
    sol = brute_force_csp(csp)
    assert sol is not None
    path = construct_witness_path(red, sol)
    assert validate_ham_path(red.graph, path) == []
    assert red.embedding.validate(red.graph) == []
    return red


def test_reduction_single_variable():
    witness_ok(CspInstance(3, 1, 2))


def test_reduction_without_constraints():
    red = witness_ok(CspInstance(3, 2, 2))
    assert all(k == "variable" for k, *_ in red.or_checks)


def test_reduction_with_forbidden_pair():
    csp = CspInstance(3, 2, 2, {((0, 0, 0), (0, 0, 1)): {(0, 1), (1, 0), (1, 1)}})
    red = witness_ok(csp)
    kinds = [k for k, *_ in red.or_checks]
    assert kinds.count("constraint") == 1
    bad = {v: 0 for v in csp.variables()}
    with pytest.raises(InputError):
        construct_witness_path(red, bad)


def test_reduction_size_bounds():
    csp = random_csp(3, 2, 2, np.random.default_rng(3), density=0.6,
                     planted={v: 0 for v in CspInstance(3, 2, 2).variables()})
    red = witness_ok(csp)
    s = red.summary()
    assert s["side_length"] <= s["side_bound"]
    per_var = red.or_checks_per_variable()
    assert max(per_var.values()) <= SPACING_FACTOR * csp.dimension * csp.domain_size ** 2


def test_reduction_rejects_bad_inputs():
    with pytest.raises(InputError):
        reduce_csp(CspInstance(2, 2, 2))
    with pytest.raises(InputError):
        reduce_csp(CspInstance(3, 2, 1))
    with pytest.raises(LayoutError):
        reduce_csp(CspInstance(3, 2, 2), spacing=6)
