"""Exact weighted Multicut for graphs given with a drawing with few crossings.

Every subset Z of the crossing edges is cut outright while the remaining
crossing edges become uncuttable. Each such normalized instance is solved on
its uncrossed part G' against complete multipartite demand graphs over the
terminals and crossing-edge endpoints, and every candidate is re-checked
against the real instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import (
    INF,
    BicliqueDecomposition,
    Edge,
    Graph,
    InfeasibleError,
    Instance,
    InstanceError,
    InternalConsistencyError,
    Solution,
    edge,
    extended_biclique_distance,
)
from .cuts import OracleLimitError, component_labels, oracle_all_minimum, verify_multicut
from .dual import (
    MulticutDual,
    _independent_partitions,
    dominating_check,
    dual_from_solution,
    face_augmented,
    minimalize_dual,
    planar_multicut_exact,
    remove_crossed_faces,
    treewidth_exact,
)
from .planar import (
    CrossedFaces,
    Drawing,
    Embedding,
    crossed_faces,
    embed,
    is_planar,
    tiny_min_crossing_drawing,
)


@dataclass(frozen=True)
class DemandCandidate:
    """Complete multipartite demands over B1-bar, B2-bar and X-bar groups."""

    B1: frozenset
    B2: frozenset
    X_groups: frozenset  # of frozensets

    @property
    def groups(self) -> list[frozenset]:
        gs = [g for g in (self.B1, self.B2) if g] + sorted(self.X_groups, key=min)
        return sorted(gs, key=min)

    @property
    def ground(self) -> frozenset:
        return frozenset().union(self.B1, self.B2, *self.X_groups)

    @property
    def H_prime(self) -> frozenset:
        out = set()
        for a, b in itertools.combinations(self.groups, 2):
            out |= {edge(u, v) for u in a for v in b}
        return frozenset(out)

    @property
    def canonical(self) -> tuple:
        return (frozenset({self.B1, self.B2}), self.X_groups)

    def demand_instance(self, base: Instance) -> Instance:
        """The instance (G', H') on the vertices and edges of ``base``."""
        return base.replace(terminals=self.ground, demands=self.H_prime, crossings=frozenset())


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def enumerate_demand_candidates(V_H, V_Ecr, bound: int = 10) -> list[DemandCandidate]:
    """All structured candidates on V_H and V_Ecr, one per canonical form."""
    ground = sorted(frozenset(V_H) | frozenset(V_Ecr))
    if len(ground) > bound:
        raise InstanceError(f"candidate bound exceeded: {len(ground)} > {bound}")
    seen = {}
    for mask in range(1 << len(ground)):
        xs = [v for i, v in enumerate(ground) if mask >> i & 1]
        rest = [v for i, v in enumerate(ground) if not mask >> i & 1]
        for part in _set_partitions(xs):
            xg = frozenset(frozenset(p) for p in part)
            for colors in itertools.product((0, 1), repeat=len(rest)):
                b1 = frozenset(v for v, c in zip(rest, colors) if c == 0)
                b2 = frozenset(v for v, c in zip(rest, colors) if c == 1)
                cand = DemandCandidate(b1, b2, xg)
                seen.setdefault(cand.canonical, cand)
    return sorted(seen.values(), key=lambda c: _cand_key(c))


def _cand_key(c: DemandCandidate):
    return (
        sorted(sorted(g) for g in (c.B1, c.B2)),
        sorted(sorted(g) for g in c.X_groups),
    )


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def _chord_options(emb: Embedding, e: Edge, prefer: Optional[int] = None):
    """Embeddings with e drawn inside a face meeting both ends exactly once."""
    a, b = e
    order = sorted(range(len(emb.faces)), key=lambda i: (i != prefer, i))
    for fid in order:
        face = emb.faces[fid]
        walk = [u for u, _ in face.darts]
        if walk.count(a) != 1 or walk.count(b) != 1:
            continue
        rot = {v: list(n) for v, n in emb.rotation.items()}
        for x, y in ((a, b), (b, a)):
            # the corner at x inside this face follows the dart entering x
            into = next(d for d in face.darts if d[1] == x)
            nbrs = rot[x]
            nbrs.insert(nbrs.index(into[0]) + 1, y)
        graph = Graph(emb.graph.vertices, emb.graph.edges | {e})
        try:
            yield Embedding(graph, {v: tuple(n) for v, n in rot.items()})
        except InstanceError:
            continue


def _place_chords(emb: Embedding, freed: list, prefer: dict, check) -> Optional[Embedding]:
    if not freed:
        return emb if check(emb) else None
    e, rest = freed[0], freed[1:]
    for nxt in _chord_options(emb, e, prefer.get(e)):
        done = _place_chords(nxt, rest, prefer, check)
        if done is not None:
            return done
    return None


def normalize(drawing: Drawing, Z) -> Instance:
    """Delete Z and make the other crossing edges uncuttable."""
    Z = frozenset(edge(*e) for e in Z)
    if not Z <= drawing.E_cr:
        raise InstanceError("Z contains an edge that crosses nothing")
    base = drawing.base
    E_cr = drawing.E_cr
    pairs = frozenset(p for p in drawing.crossing_pairs if not (set(p) & Z))
    still = frozenset(x for p in pairs for x in p)
    freed = sorted(E_cr - Z - still)
    edges = tuple(
        (u, v, INF if (u, v) in E_cr else w) for u, v, w in base.edges if (u, v) not in Z
    )
    emb = drawing.embedding()
    prefer = {}
    if freed:
        for cluster, fid in crossed_faces(drawing, emb).placement:
            prefer.update((x, fid) for x in cluster)

    def check(cand: Embedding) -> bool:
        probe = Drawing(base, pairs, tuple(sorted(cand.rotation.items())))
        try:
            crossed_faces(probe, cand)
        except InstanceError:
            return False
        return True

    placed = _place_chords(emb, freed, prefer, check)
    rotation = None if placed is None else tuple(sorted(placed.rotation.items()))
    return base.replace(edges=edges, crossings=pairs, rotation=rotation, e_pi=frozenset())


# ---------------------------------------------------------------------------
# Normalized solve
# ---------------------------------------------------------------------------


def uncrossed_part(instance: Instance) -> tuple[Instance, Drawing, Embedding, CrossedFaces]:
    drawing = Drawing.of(instance)
    g_prime = instance.without_edges(drawing.E_cr).replace(crossings=frozenset())
    if not is_planar(g_prime.graph):
        raise InstanceError("uncrossed part of the drawing is not planar")
    try:
        emb = drawing.embedding()
    except InstanceError:
        emb = embed(drawing.uncrossed)
    F = crossed_faces(drawing, emb)
    return g_prime, drawing, emb, F


def _check_finite(instance: Instance) -> None:
    hard = [e for e, w in instance.weight.items() if w == INF]
    label = component_labels(instance.vertices, hard)
    for a, b in sorted(instance.demands):
        if label[a] == label[b]:
            raise InfeasibleError(f"no finite multicut: {a} and {b} are joined by inf edges")


def solve_normalized(instance: Instance, cutoff=INF, stats: Optional[dict] = None) -> Optional[Solution]:
    """Minimum multicut of a normalized instance, or None if none beats cutoff.

    Candidates are complete multipartite demand graphs on the terminals and
    crossing-edge endpoints. Terminal groups range over the maximal
    demand-free groupings of terminals. Endpoints that share no infinite
    component with a terminal are first left unassigned; when the solution
    for the relaxed demands leaks between groups through an infinite edge,
    the lowest such endpoint group is assigned to each terminal group in
    turn.
    """
    E_cr = Drawing.of(instance).E_cr
    if any(instance.weight[e] != INF for e in E_cr):
        raise InstanceError("instance is not normalized: a crossing edge has finite weight")
    _check_finite(instance)
    g_prime, drawing, emb, F = uncrossed_part(instance)
    if not instance.demands:
        return Solution(frozenset(), 0) if cutoff > 0 else None
    U = frozenset(instance.terminals) | frozenset(v for e in E_cr for v in e)
    hard = [e for e, w in instance.weight.items() if w == INF]
    blob = component_labels(instance.vertices, hard)
    members: dict = {}
    for v in sorted(U):
        members.setdefault(blob[v], []).append(v)
    term_blobs = sorted({blob[t] for t in instance.terminals})
    free = [b for b in sorted(members) if b not in set(term_blobs)]
    conflict = set()
    for a, b in instance.demands:
        conflict |= {(blob[a], blob[b]), (blob[b], blob[a])}
    best: list = [None, cutoff]
    label_all = instance.graph

    def attempt(groups: list[frozenset], assigned: dict):
        if stats is not None:
            stats["calls"] = stats.get("calls", 0) + 1
        terms = frozenset().union(*groups)
        demands = frozenset(
            edge(u, v)
            for i, j in itertools.combinations(range(len(groups)), 2)
            for u in groups[i]
            for v in groups[j]
        )
        sub = g_prime.replace(terminals=terms, demands=demands)
        try:
            sol = planar_multicut_exact(sub, F_star=F, cutoff=best[1], assume_planar=True)
        except InfeasibleError:
            return
        if sol is None:
            return
        label = component_labels(instance.vertices, label_all.edges - sol.edges)
        owner: dict = {}
        leaky = set()
        for i, g in enumerate(groups):
            for v in g:
                c = label[v]
                if owner.setdefault(c, i) != i:
                    leaky.add(c)
        if not leaky:
            if not verify_multicut(instance, sol.edges):
                raise InternalConsistencyError("relaxed candidate is not a multicut")
            if sol.weight < best[1]:
                best[0], best[1] = Solution.of(instance, sol.edges), sol.weight
            return
        pick = next(
            (b for b in free if b not in assigned and any(label[v] in leaky for v in members[b])),
            None,
        )
        if pick is None:
            raise InternalConsistencyError("leak without an unassigned endpoint group")
        for k in range(len(groups)):
            grown = list(groups)
            grown[k] = grown[k] | frozenset(members[pick])
            attempt(grown, {**assigned, pick: k})

    for parts in _independent_partitions(term_blobs, conflict):
        groups = [frozenset(v for b in p for v in members[b]) for p in parts]
        attempt(groups, {})
    if best[0] is None and cutoff == INF:
        raise InfeasibleError("no demand candidate yields a multicut")
    return best[0]


def solve_crossing(
    instance: Instance, draw_tiny: bool = False, stats: Optional[dict] = None
) -> Solution:
    """Minimum-weight multicut using the instance's drawing annotation."""
    instance = with_drawing(instance, draw_tiny)
    _check_finite(instance)
    drawing = Drawing.of(instance)
    E_cr = sorted(drawing.E_cr)
    zs = []
    for k in range(len(E_cr) + 1):
        for Z in itertools.combinations(E_cr, k):
            zs.append((instance.cost(Z), Z))
    zs.sort()
    best: Optional[Solution] = None
    bound = INF
    for wz, Z in zs:
        if wz >= bound:
            break
        norm = normalize(drawing, Z)
        try:
            sz = solve_normalized(norm, cutoff=bound - wz, stats=stats)
        except InfeasibleError:
            continue
        if sz is None:
            continue
        cand = sz.edges | frozenset(Z)
        if not verify_multicut(instance, cand):
            continue
        cw = instance.cost(cand)
        if cw < bound:
            best, bound = Solution.of(instance, cand), cw
    if best is None:
        raise InfeasibleError("no finite multicut")
    return best


def with_drawing(instance: Instance, draw_tiny: bool = False) -> Instance:
    """The instance itself if it carries a usable drawing, else a tiny drawing."""
    if instance.crossings or is_planar(instance.graph):
        return instance
    if not draw_tiny:
        raise InstanceError("instance has no drawing; pass --draw-tiny for small graphs")
    d = tiny_min_crossing_drawing(instance.graph)
    if d is None:
        raise InstanceError("no drawing with at most 3 crossings")
    return instance.replace(crossings=d.crossing_pairs, rotation=d.rotation)


# ---------------------------------------------------------------------------
# Witness construction and structural claims
# ---------------------------------------------------------------------------


def _x_bar(instance: Instance, S, X: frozenset, U: frozenset) -> frozenset:
    label = component_labels(instance.vertices, instance.edge_set - frozenset(S))
    hot = {label[x] for x in X}
    return frozenset(v for v in U if label[v] in hot)


def witness_solution(instance: Instance, dec: Optional[BicliqueDecomposition] = None, max_edges: int = 20):
    """A minimum multicut with the fewest ground elements sharing a component with X."""
    dec = dec or extended_biclique_distance(instance.demand_graph)
    drawing = Drawing.of(instance)
    U = frozenset(instance.terminals) | frozenset(v for e in drawing.E_cr for v in e)
    sols = oracle_all_minimum(instance, max_edges=max_edges)
    return min(sols, key=lambda S: (len(_x_bar(instance, S, dec.X, U)), sorted(S)))


def witness_candidate(
    instance: Instance, S_star, dec: Optional[BicliqueDecomposition] = None
) -> DemandCandidate:
    """The demand graph built from S*: B1-bar, B2-bar and one group per X component.

    Components whose only terminals lie in I go to B1-bar.
    """
    dec = dec or extended_biclique_distance(instance.demand_graph)
    drawing = Drawing.of(instance)
    U = frozenset(instance.terminals) | frozenset(v for e in drawing.E_cr for v in e)
    label = component_labels(instance.vertices, instance.edge_set - frozenset(S_star))
    comp_terms: dict = {}
    for t in instance.terminals:
        comp_terms.setdefault(label[t], set()).add(t)
    x_groups: dict = {}
    b1, b2 = set(), set()
    for v in sorted(U):
        c = label[v]
        ts = comp_terms.get(c, set())
        if ts & dec.X:
            x_groups.setdefault(c, set()).add(v)
        elif ts & dec.B1 or (ts and ts <= dec.I):
            b1.add(v)
        else:
            b2.add(v)
    return DemandCandidate(
        frozenset(b1), frozenset(b2), frozenset(frozenset(g) for g in x_groups.values())
    )


def ground_set(instance: Instance) -> frozenset:
    """V(H) together with the endpoints of crossing edges."""
    return frozenset(instance.terminals) | frozenset(v for e in Drawing.of(instance).E_cr for v in e)


def xbar_faces_hold_x(dual: MulticutDual, x_bar: frozenset, X: frozenset) -> bool:
    """Every face holding an element of x_bar also holds a terminal of X."""
    return all(vs & X for vs in dual.faces().values() if vs & x_bar)


def cubic_touch_xbar(dual: MulticutDual, x_bar: frozenset) -> bool:
    """Every degree-3 vertex touches a face holding an element of x_bar."""
    faces = dual.faces()
    return all(
        any(faces[f] & x_bar for f in dual.vertex_faces(vid))
        for vid in dual.vertices
        if dual.degree(vid) == 3
    )


@dataclass(frozen=True)
class WitnessReport:
    mu: int
    f_star: int
    tw: Optional[int]
    dom_size: int
    dominated: bool
    duals: int
    lifts: bool
    witness_cut: bool
    xbar_faces_hold_x: bool
    cubic_touch_xbar: bool
    cubic_checked: int = 0
    xbar_faces_checked: int = 0

    def format(self) -> str:
        yn = lambda b: "yes" if b else "no"
        tw = "-" if self.tw is None else str(self.tw)
        return (
            f"mu={self.mu} fstar={self.f_star} tw={tw} dom_size={self.dom_size} "
            f"dominated={yn(self.dominated)} duals={self.duals} lifts={yn(self.lifts)} "
            f"witness_cut={yn(self.witness_cut)} xbar_faces_hold_x={yn(self.xbar_faces_hold_x)} "
            f"cubic_touch_xbar={yn(self.cubic_touch_xbar)} cubic_checked={self.cubic_checked} "
            f"xbar_faces_checked={self.xbar_faces_checked}"
        )


def witness_normalization(instance: Instance, max_edges: int = 20) -> Instance:
    """Normalize by the crossing edges of the lexicographically first oracle minimum."""
    drawing = Drawing.of(instance)
    S = min(oracle_all_minimum(instance, max_edges=max_edges), key=sorted)
    return normalize(drawing, frozenset(S) & drawing.E_cr)


def witness_report(instance: Instance, max_edges: int = 20, max_duals: int = 8) -> WitnessReport:
    """Check the structural claims for the witness candidate of a crossing instance.

    The instance is first normalized by an oracle minimum. Duals come from the
    minimum multicuts of (G', H'*): the solver's answer plus the oracle's
    minima, each made inclusion-minimal and subcubic before F* is removed.
    """
    norm = witness_normalization(instance, max_edges)
    dec = extended_biclique_distance(norm.demand_graph)
    S_star = witness_solution(norm, dec, max_edges)
    cand = witness_candidate(norm, S_star, dec)
    x_bar = _x_bar(norm, S_star, dec.X, ground_set(norm))
    g_prime, drawing, emb, F = uncrossed_part(norm)
    sub = cand.demand_instance(g_prime)
    lifts = wcut = True
    sols = []
    if sub.demands:
        first = planar_multicut_exact(sub, F_star=F, assume_planar=True)
        lifts = verify_multicut(norm.replace(terminals=cand.ground, demands=cand.H_prime), first.edges)
        wcut = verify_multicut(sub, frozenset(S_star) & g_prime.edge_set)
        sols = [first.edges]
        try:
            extra = oracle_all_minimum(sub, max_edges=max_edges)
        except OracleLimitError:
            extra = []
        sols += sorted((frozenset(s) for s in extra if frozenset(s) != first.edges), key=sorted)
    sols = sols[:max_duals]
    ok_a = ok_b = True
    cubic = xfaces = 0
    tws = []
    dom_size, dominated = 0, True
    for i, S in enumerate(sols):
        c = minimalize_dual(dual_from_solution(emb, sub, S))
        cp = remove_crossed_faces(c, F)
        ok_a &= xbar_faces_hold_x(cp, x_bar, dec.X)
        ok_b &= cubic_touch_xbar(cp, x_bar)
        cubic += sum(1 for v in cp.vertices if cp.degree(v) == 3)
        xfaces += sum(1 for vs in cp.faces().values() if vs & x_bar)
        try:
            tws.append(treewidth_exact(cp.abstract_graph()))
        except InstanceError:
            pass
        if i == 0:
            aug, znode = face_augmented(cp)
            A = {znode[f] for f, vs in cp.faces().items() if vs & dec.X}
            dom_size = len(A)
            dominated = dominating_check(aug, A, 5) if A else aug.n == 0
    return WitnessReport(
        mu=dec.mu,
        f_star=len(F.F_star),
        tw=max(tws) if tws else None,
        dom_size=dom_size,
        dominated=dominated,
        duals=len(sols),
        lifts=lifts,
        witness_cut=wcut,
        xbar_faces_hold_x=ok_a,
        cubic_touch_xbar=ok_b,
        cubic_checked=cubic,
        xbar_faces_checked=xfaces,
    )
