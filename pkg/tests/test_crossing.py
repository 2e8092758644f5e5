import itertools

import pytest

from helpers import brute_min_multicut, crossing_instance, k5, make, path3
from nearplanar.core import INF, InfeasibleError, InstanceError
from nearplanar.crossing import (
    DemandCandidate,
    cubic_touch_xbar,
    enumerate_demand_candidates,
    normalize,
    solve_crossing,
    solve_normalized,
    with_drawing,
    witness_report,
    xbar_faces_hold_x,
)
from nearplanar.cuts import oracle_all_minimum, oracle_min_multicut, verify_multicut
from nearplanar.dual import dual_from_solution, minimalize_dual, planar_multicut_exact
from nearplanar.planar import Drawing, crossed_faces, embed


def oracle_weight(inst):
    try:
        return oracle_min_multicut(inst).weight
    except InfeasibleError:
        return None


def brute_candidate_count(ground) -> int:
    """Distinct (unordered B-pair, X-groups) forms over all labelings."""
    ground = sorted(ground)
    labels = ["b1", "b2"] + [f"x{i}" for i in range(len(ground))]
    forms = set()
    for lab in itertools.product(labels, repeat=len(ground)):
        b1 = frozenset(v for v, l in zip(ground, lab) if l == "b1")
        b2 = frozenset(v for v, l in zip(ground, lab) if l == "b2")
        xs = {}
        for v, l in zip(ground, lab):
            if l.startswith("x"):
                xs.setdefault(l, set()).add(v)
        forms.add((frozenset({b1, b2}), frozenset(frozenset(g) for g in xs.values())))
    return len(forms)


# --- normalization -----------------------------------------------------------


def test_normalize_all_crossing_edges_deleted():
    d = Drawing.of(k5())
    inst = normalize(d, d.E_cr)
    assert not inst.crossings
    assert inst.edge_set == k5().edge_set - d.E_cr
    assert all(w != INF for w in inst.weight.values())


def test_normalize_empty_z_makes_crossing_edges_uncuttable():
    d = Drawing.of(k5())
    inst = normalize(d, ())
    assert inst.crossings == k5().crossings
    assert {e for e, w in inst.weight.items() if w == INF} == d.E_cr


def test_normalize_one_crossing_edge():
    d = Drawing.of(k5())
    inst = normalize(d, [(0, 2)])
    assert (0, 2) not in inst.edge_set
    assert [e for e, w in inst.weight.items() if w == INF] == [(1, 3)]
    assert not inst.crossings
    assert inst.rotation is not None
    assert Drawing.of(inst).embedding().graph == inst.graph


def test_normalize_rejects_uncrossed_edge():
    with pytest.raises(InstanceError, match="crosses nothing"):
        normalize(Drawing.of(k5()), [(0, 1)])


@pytest.mark.parametrize("seed", range(40))
def test_normalized_drawings_stay_valid(seed):
    inst = crossing_instance(seed)
    d = Drawing.of(inst)
    for k in range(len(d.E_cr) + 1):
        for Z in itertools.combinations(sorted(d.E_cr), k):
            norm = normalize(d, Z)
            crossed_faces(Drawing.of(norm))
            assert all(norm.weight[e] == INF for e in d.E_cr - set(Z))


# --- demand candidates -------------------------------------------------------


def test_candidates_small_ground_sets():
    assert len(enumerate_demand_candidates([], [])) == 1
    assert enumerate_demand_candidates([], [])[0].H_prime == frozenset()
    one = enumerate_demand_candidates([4], [])
    assert len(one) == 2 == brute_candidate_count([4])


@pytest.mark.parametrize("ground", [[0, 1], [0, 1, 2], [2, 5, 7, 8]])
def test_candidate_counts_match_brute_force(ground):
    cands = enumerate_demand_candidates(ground[:1], ground[1:])
    assert len(cands) == brute_candidate_count(ground)
    assert len({c.canonical for c in cands}) == len(cands)
    for c in cands:
        assert c.ground == frozenset(ground)


def test_candidate_bound():
    with pytest.raises(InstanceError, match="candidate bound exceeded"):
        enumerate_demand_candidates(range(6), range(6, 11))


def test_candidate_is_complete_multipartite():
    c = DemandCandidate(frozenset({0, 1}), frozenset({2}), frozenset({frozenset({3, 4})}))
    assert c.groups == [frozenset({0, 1}), frozenset({2}), frozenset({3, 4})]
    expect = {(0, 2), (1, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)}
    assert c.H_prime == expect


# --- normalized solve --------------------------------------------------------


def test_normalized_without_crossings_is_planar_solve():
    inst = make(4, [(0, 1), (1, 2), (2, 3), (0, 3)], demands=[(0, 2)])
    assert solve_normalized(inst).weight == planar_multicut_exact(inst).weight == 2


def test_normalized_k5():
    norm = normalize(Drawing.of(k5()), ())
    sol = solve_normalized(norm)
    # the infinite edges glue 0 to 2 and 1 to 3, leaving six edges between the pairs
    assert sol.weight == brute_min_multicut(norm) == 6
    assert verify_multicut(norm, sol.edges)


def test_normalized_uses_paths_through_crossing_edges():
    # separating 0 from 1 in G minus the crossing edges ignores the route 0-2-1
    norm = normalize(Drawing.of(k5(demands=[(0, 1)])), ())
    g_prime = norm.without_edges(Drawing.of(norm).E_cr).replace(crossings=frozenset())
    naive = planar_multicut_exact(g_prime)
    assert not verify_multicut(norm, naive.edges)
    sol = solve_normalized(norm)
    assert verify_multicut(norm, sol.edges)
    assert sol.weight == brute_min_multicut(norm)


def test_normalized_rejects_finite_crossing_edges():
    with pytest.raises(InstanceError, match="not normalized"):
        solve_normalized(k5())


def test_normalized_infeasible():
    norm = normalize(Drawing.of(k5(demands=[(0, 2)])), ())
    with pytest.raises(InfeasibleError):
        solve_normalized(norm)


@pytest.mark.parametrize("seed", range(60))
def test_normalized_matches_oracle(seed):
    d = Drawing.of(crossing_instance(seed))
    norm = normalize(d, ())
    expect = oracle_weight(norm)
    if expect is None:
        with pytest.raises(InfeasibleError):
            solve_normalized(norm)
    else:
        assert solve_normalized(norm).weight == expect


# --- full solver -------------------------------------------------------------


def test_k5_unit_weights():
    assert solve_crossing(k5()).weight == 4


def test_planar_drawing_is_planar_solve():
    assert solve_crossing(path3((5, 1))).weight == 1


def test_unique_optimum_with_one_crossing_edge():
    heavy = {(0, 1): 1, (0, 2): 1, (0, 3): 1, (0, 4): 1}
    es = [(u, v, heavy.get((u, v), 5)) for u, v in itertools.combinations(range(5), 2)]
    inst = make(5, es, demands=[(0, 4)], crossings=frozenset({((0, 2), (1, 3))}))
    minima = oracle_all_minimum(inst)
    assert len(minima) == 1
    (only,) = minima
    assert only & Drawing.of(inst).E_cr == {(0, 2)}
    sol = solve_crossing(inst)
    assert sol.edges == only and sol.weight == 4


def test_drawing_required_for_nonplanar():
    bare = k5(crossing=False)
    with pytest.raises(InstanceError, match="draw-tiny"):
        solve_crossing(bare)
    assert solve_crossing(bare, draw_tiny=True).weight == 4
    assert with_drawing(bare, draw_tiny=True).crossings


def test_inf_path_is_infeasible():
    with pytest.raises(InfeasibleError):
        solve_crossing(make(3, [(0, 1, INF), (1, 2, INF)], demands=[(0, 2)]))


@pytest.mark.parametrize("seed", range(80))
def test_matches_oracle(seed):
    inst = crossing_instance(seed)
    expect = oracle_weight(inst)
    if expect is None:
        with pytest.raises(InfeasibleError):
            solve_crossing(inst)
        return
    sol = solve_crossing(inst)
    assert sol.weight == expect
    assert verify_multicut(inst, sol.edges)


# --- witness claims ----------------------------------------------------------


def test_claim_predicates_on_a_small_dual():
    C4 = make(4, [(0, 1), (1, 2), (2, 3), (0, 3)], demands=list(itertools.combinations(range(4), 2)))
    M = minimalize_dual(dual_from_solution(embed(C4.graph), C4, C4.edge_set))
    assert any(M.degree(v) == 3 for v in M.vertices)
    assert not cubic_touch_xbar(M, frozenset())
    assert cubic_touch_xbar(M, frozenset(range(4)))
    assert xbar_faces_hold_x(M, frozenset(), frozenset())
    assert not xbar_faces_hold_x(M, frozenset({0}), frozenset())
    assert xbar_faces_hold_x(M, frozenset({0}), frozenset({0}))


@pytest.mark.parametrize("seed", range(40))
def test_witness_claims_hold(seed):
    r = witness_report(crossing_instance(seed))
    assert r.lifts and r.witness_cut
    assert r.xbar_faces_hold_x and r.cubic_touch_xbar
    assert r.duals >= 1 or r.dom_size == 0


def test_report_format():
    r = witness_report(k5(demands=[(0, 1), (1, 4), (0, 4)]))
    keys = [kv.split("=")[0] for kv in r.format().split()]
    assert keys == [
        "mu", "fstar", "tw", "dom_size", "dominated", "duals",
        "lifts", "witness_cut", "xbar_faces_hold_x", "cubic_touch_xbar",
        "cubic_checked", "xbar_faces_checked",
    ]
