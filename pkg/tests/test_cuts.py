import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_min_multicut, brute_relevant, kplanar_instance, make, path3, random_connected_edges
from nearplanar.core import INF, Graph, InfeasibleError, KPlanarContext, edge, extended_biclique_distance
from nearplanar.cuts import (
    UNREACHABLE,
    OracleLimitError,
    cut_distance,
    lam,
    min_cut,
    oracle_all_minimum,
    oracle_min_multicut,
    relevant_set,
    verify_multicut,
)
from nearplanar.planar import find_planarizing_edges


def graph(n, pairs) -> Graph:
    return Graph(frozenset(range(n)), frozenset(edge(*p) for p in pairs))


def test_verify_examples():
    p = path3()
    assert verify_multicut(p, [(0, 1)])
    assert not verify_multicut(p, [])
    tri = make(3, [(0, 1), (1, 2), (0, 2)], demands=[(0, 1), (1, 2), (0, 2)])
    assert not verify_multicut(tri, [(0, 1), (1, 2)])


def test_verify_unknown_edge():
    with pytest.raises(Exception):
        verify_multicut(path3(), [(0, 2)])


def test_min_cut_examples():
    value, cut, side = min_cut(graph(3, [(0, 1), (1, 2)]), {0}, {2})
    assert value == 1
    K4 = graph(4, itertools.combinations(range(4), 2))
    # brute force over edge subsets of size <= 3 gives 3
    assert nx.edge_connectivity(nx.complete_graph(4), 0, 1) == 3
    value, cut, side = min_cut(K4, {0}, {1})
    assert value == 3 and 0 in side and 1 not in side and K4.boundary(side) == cut
    value, cut, side = min_cut(graph(4, [(0, 1), (2, 3)]), {0}, {3})
    assert value == 0 and cut == frozenset()


def test_relevant_set_examples():
    assert relevant_set(graph(3, [(0, 1), (1, 2)]), {0}, {2}) == {0, 1}
    star = graph(4, [(0, 1), (0, 2), (0, 3)])  # center 0
    assert relevant_set(star, {1}, {2}) == {0, 1, 3}
    claw = graph(4, [(0, 1), (1, 2), (1, 3)])  # a=0, b=1, c=2, d=3
    assert relevant_set(claw, {0}, {2, 3}) == {0}


def test_relevant_set_rejects_bad_queries():
    g = graph(3, [(0, 1), (1, 2)])
    with pytest.raises(Exception):
        relevant_set(g, {0}, {0, 2})
    with pytest.raises(Exception):
        relevant_set(graph(4, [(0, 1), (2, 3)]), {0}, {3})


def test_cut_distance_examples():
    g = graph(3, [(0, 1), (1, 2)])
    assert cut_distance(g, [], {0}, {2}) == 0
    assert cut_distance(g, [(0, 1), (1, 2)], {0}, {2}) == 2
    # route 0-1-4 crosses one cut edge, route 0-2-3-4 crosses three
    g2 = graph(5, [(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)])
    assert cut_distance(g2, [(0, 1), (0, 2), (2, 3), (3, 4)], {0}, {4}) == 1
    assert cut_distance(graph(2, []), [], {0}, {1}) is UNREACHABLE


def test_oracle_examples():
    star = make(4, [(0, 1), (0, 2), (0, 3)], demands=[(1, 2), (2, 3), (1, 3)])
    assert brute_min_multicut(star) == 2
    assert oracle_min_multicut(star).weight == 2
    sol = oracle_min_multicut(path3((5, 1)))
    assert sol.weight == 1 and sol.edges == {(1, 2)}
    with pytest.raises(InfeasibleError, match="no finite multicut"):
        oracle_min_multicut(make(2, [(0, 1, INF)], demands=[(0, 1)]))


def test_oracle_bound():
    big = make(8, list(itertools.combinations(range(8), 2)), demands=[(0, 1)])
    with pytest.raises(OracleLimitError):
        oracle_all_minimum(big, max_edges=20)


@pytest.mark.parametrize("seed", range(40))
def test_oracle_modes_agree(seed):
    inst = kplanar_instance(seed)
    a = oracle_min_multicut(inst, mode="enumerate")
    b = oracle_min_multicut(inst, mode="branch")
    assert a.weight == b.weight == brute_min_multicut(inst)
    assert verify_multicut(inst, a.edges) and verify_multicut(inst, b.edges)


def test_oracle_tie_break_is_lexicographic():
    # a 4-cycle with one demand across: cutting either side pair costs 2
    inst = make(4, [(0, 1), (1, 2), (2, 3), (0, 3)], demands=[(0, 2)])
    sols = oracle_all_minimum(inst)
    assert oracle_min_multicut(inst).edges == min(sols, key=sorted)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_relevant_set_matches_enumeration(n, seed):
    rng = random.Random(seed)
    es = random_connected_edges(rng, n)
    g = graph(n, es)
    vs = list(range(n))
    rng.shuffle(vs)
    k1 = rng.randint(1, n - 1)
    k2 = rng.randint(1, n - k1)
    Y1, Y2 = frozenset(vs[:k1]), frozenset(vs[k1 : k1 + k2])
    lam_, top = brute_relevant(n, es, Y1, Y2)
    Y3 = relevant_set(g, Y1, Y2)
    assert lam(g, Y1, Y2) == lam_
    assert Y3 == top
    # each component of G[Y3] contains a component of G[Y1]
    for comp in g.induced(Y3).components():
        assert comp & Y1


def _connected_contexts(count):
    for seed in range(count):
        inst = kplanar_instance(seed)
        if inst.graph.is_connected():
            yield inst, KPlanarContext(inst, find_planarizing_edges(inst.graph, 4))


@pytest.mark.parametrize("inst, ctx", list(_connected_contexts(40)))
def test_components_meet_terminals_or_pi_edges(inst, ctx):
    for S in oracle_all_minimum(inst):
        S0 = frozenset(S) - ctx.e_pi
        for Q in ctx.G0.remove_edges(S0).components():
            assert Q & inst.terminals or any((u in Q) != (v in Q) for u, v in ctx.e_pi)


@pytest.mark.parametrize("inst, ctx", list(_connected_contexts(40)))
def test_few_edges_between_same_side_components(inst, ctx):
    if not inst.is_unweighted:
        pytest.skip("weighted")
    dec = extended_biclique_distance(inst.demand_graph)
    for S in oracle_all_minimum(inst):
        S0 = frozenset(S) - ctx.e_pi
        comps = ctx.G0.remove_edges(S0).components()
        for side in (dec.B1, dec.B2):
            allowed = side | dec.I
            ok = [Q for Q in comps if Q & inst.terminals <= allowed]
            for Q1, Q2 in itertools.combinations(ok, 2):
                between = sum(1 for u, v in ctx.G0.edges if (u in Q1 and v in Q2) or (u in Q2 and v in Q1))
                assert between <= ctx.pi


@pytest.mark.parametrize("seed", range(30))
def test_cutting_part_of_a_minimum_keeps_it_minimum(seed):
    inst = kplanar_instance(seed)
    S = oracle_min_multicut(inst)
    rng = random.Random(seed)
    F = frozenset(e for e in sorted(S.edges) if rng.random() < 0.5)
    rest = oracle_min_multicut(inst.without_edges(F))
    assert inst.cost(rest.edges | F) == S.weight
    assert verify_multicut(inst, rest.edges | F)
