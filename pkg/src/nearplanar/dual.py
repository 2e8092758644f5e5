"""Multicut duals, treewidth measurement and the exact planar subsolver.

A dual C is kept combinatorially. Its starting point is the set of dual edges
of a multicut S in a connected plane graph; the faces of that graph are the
components of G minus S ("atoms"). Every edge of C knows the atoms on its two
sides and every vertex knows the atom of each sector between consecutive
edge-ends, so removing an edge is just a merge of the two faces it separates.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    INF,
    Edge,
    Graph,
    InfeasibleError,
    Instance,
    InstanceError,
    Solution,
    Weight,
    edge,
)
from .cuts import component_labels, verify_multicut
from .planar import CrossedFaces, Embedding, embed, is_planar
from ._multiway import multiway_cut


@dataclass
class _Vertex:
    face: int  # face of the primal embedding containing this vertex
    ends: list  # edge ids in cyclic order; a loop appears twice
    sectors: list  # sectors[i] lies between ends[i] and ends[i + 1]


@dataclass
class _Edge:
    ends: list  # two vertex ids
    primal: Optional[Edge]  # None for edges that cross nothing
    sides: tuple  # atoms on the two sides


class MulticutDual:
    """A plane graph C drawn over a connected plane primal graph."""

    def __init__(self, embedding: Embedding, instance: Instance, atom_of: dict):
        self.embedding = embedding
        self.instance = instance
        self.atom_of = atom_of
        self.members: dict = {}
        for v, a in atom_of.items():
            self.members.setdefault(a, set()).add(v)
        self.face_rep = {a: a for a in self.members}
        self.vertices: dict = {}
        self.edges: dict = {}

    # -- faces ------------------------------------------------------------

    def face(self, atom) -> int:
        r = self.face_rep[atom]
        while self.face_rep[r] != r:
            r = self.face_rep[r]
        self.face_rep[atom] = r
        return r

    def _merge(self, a, b) -> None:
        ra, rb = self.face(a), self.face(b)
        if ra != rb:
            self.face_rep[max(ra, rb)] = min(ra, rb)

    def faces(self) -> dict:
        """Face id -> primal vertices lying in that face."""
        out: dict = {}
        for a, vs in self.members.items():
            out.setdefault(self.face(a), set()).update(vs)
        return {f: frozenset(vs) for f, vs in sorted(out.items())}

    def face_assignment(self) -> dict:
        return {t: self.face(self.atom_of[t]) for t in sorted(self.instance.terminals)}

    def vertex_faces(self, vid) -> frozenset:
        return frozenset(self.face(a) for a in self.vertices[vid].sectors)

    # -- summary ----------------------------------------------------------

    @property
    def crossed(self) -> frozenset:
        return frozenset(e.primal for e in self.edges.values() if e.primal is not None)

    @property
    def weight(self) -> Weight:
        return self.instance.cost(self.crossed)

    def degree(self, vid) -> int:
        return len(self.vertices[vid].ends)

    def separates(self) -> bool:
        fa = self.face_assignment()
        return all(fa[a] != fa[b] for a, b in self.instance.demands)

    def abstract_graph(self) -> Graph:
        """Simple graph underlying C on vertex labels 0..k-1."""
        index = {vid: i for i, vid in enumerate(sorted(self.vertices))}
        es = set()
        for e in self.edges.values():
            x, y = (index[v] for v in e.ends)
            if x != y:
                es.add(edge(x, y))
        return Graph(frozenset(index.values()), frozenset(es))

    # -- edits ------------------------------------------------------------

    def copy(self) -> "MulticutDual":
        c = MulticutDual.__new__(MulticutDual)
        c.embedding, c.instance, c.atom_of, c.members = (
            self.embedding,
            self.instance,
            self.atom_of,
            self.members,
        )
        c.face_rep = dict(self.face_rep)
        c.vertices = {k: _Vertex(v.face, list(v.ends), list(v.sectors)) for k, v in self.vertices.items()}
        c.edges = {k: _Edge(list(e.ends), e.primal, e.sides) for k, e in self.edges.items()}
        return c

    def removable(self, eid) -> bool:
        e = self.edges[eid]
        f1, f2 = self.face(e.sides[0]), self.face(e.sides[1])
        if f1 == f2:
            return True
        for a, b in self.instance.demands:
            fa, fb = self.face(self.atom_of[a]), self.face(self.atom_of[b])
            if {fa, fb} == {f1, f2}:
                return False
        return True

    def remove_edge(self, eid) -> None:
        e = self.edges.pop(eid)
        self._merge(*e.sides)
        for vid in dict.fromkeys(e.ends):
            vx = self.vertices[vid]
            while eid in vx.ends:
                i = vx.ends.index(eid)
                del vx.ends[i]
                del vx.sectors[i]  # sector i-1 now spans both
            if not vx.ends:
                del self.vertices[vid]

    def check(self) -> None:
        """Assert that rotations, sectors and edge sides agree."""
        for eid, e in self.edges.items():
            for vid in e.ends:
                if eid not in self.vertices[vid].ends:
                    raise AssertionError("edge end missing from rotation")
        for vid, vx in self.vertices.items():
            if not vx.ends and len(vx.sectors) == 1:
                continue
            if not vx.ends or len(vx.ends) != len(vx.sectors):
                raise AssertionError(f"bad rotation at {vid}")
            for i, eid in enumerate(vx.ends):
                sides = {self.face(a) for a in self.edges[eid].sides}
                around = {self.face(vx.sectors[i - 1]), self.face(vx.sectors[i])}
                if around != sides:
                    raise AssertionError(f"sectors at {vid} disagree with edge sides")


def dual_from_solution(
    embedding: Embedding, instance: Instance, S: Iterable[Edge]
) -> MulticutDual:
    """The dual edges of S, drawn through the faces of the primal embedding."""
    S = frozenset(edge(*e) for e in S)
    if embedding.graph != instance.graph:
        raise InstanceError("embedding does not belong to this instance")
    if not instance.graph.is_connected():
        raise InstanceError("multicut duals need a connected primal graph")
    if not verify_multicut(instance, S):
        raise InstanceError("edge set is not a multicut")
    label = component_labels(instance.vertices, instance.edge_set - S)
    dual = MulticutDual(embedding, instance, label)
    for fid, face in enumerate(embedding.faces):
        ends, sectors = [], []
        for u, v in face.darts:
            e = edge(u, v)
            if e in S:
                ends.append(("x", e))
                sectors.append(label[v])
        if ends:
            dual.vertices[("f", fid)] = _Vertex(fid, ends, sectors)
    for e in sorted(S):
        fa, fb = embedding.dart_face[e], embedding.dart_face[(e[1], e[0])]
        dual.edges[("x", e)] = _Edge([("f", fa), ("f", fb)], e, (label[e[0]], label[e[1]]))
    return dual


def _split(dual: MulticutDual, vid) -> None:
    vx = dual.vertices.pop(vid)
    xs, ss = vx.ends, vx.sectors
    d = len(xs)
    face = vx.face
    new = [("a", face, j) for j in range(d - 2)]
    art = [("s", face, j) for j in range(d - 3)]
    for j in range(d - 2):
        if j == 0:
            ends = [xs[0], xs[1], art[0]]
            secs = [ss[0], ss[1], ss[d - 1]]
        elif j == d - 3:
            ends = [art[j - 1], xs[d - 2], xs[d - 1]]
            secs = [ss[d - 3], ss[d - 2], ss[d - 1]]
        else:
            ends = [art[j - 1], xs[j + 1], art[j]]
            secs = [ss[j], ss[j + 1], ss[d - 1]]
        dual.vertices[new[j]] = _Vertex(face, ends, secs)
    for j, aid in enumerate(art):
        dual.edges[aid] = _Edge([new[j], new[j + 1]], None, (ss[j + 1], ss[d - 1]))
    # reattach original edge-ends, one occurrence at a time
    owner = []
    for j in range(d - 2):
        for eid in dual.vertices[new[j]].ends:
            if eid[0] == "x":
                owner.append((eid, new[j]))
    for eid, nv in owner:
        ends = dual.edges[eid].ends
        ends[ends.index(vid)] = nv


def minimalize_dual(dual: MulticutDual) -> MulticutDual:
    """Inclusion-minimal, subcubic dual with the same faces-separation.

    Crossing edges are dropped greedily in ascending order, vertices of
    degree above three are expanded into a path of degree-3 vertices, and
    then expansion edges that separate nothing are dropped too.
    """
    c = dual.copy()
    for eid in sorted(k for k in c.edges if k[0] == "x"):
        if c.removable(eid):
            c.remove_edge(eid)
    for vid in sorted(c.vertices):
        if len(c.vertices[vid].ends) > 3:
            _split(c, vid)
    for eid in sorted(k for k in c.edges if k[0] == "s"):
        if c.removable(eid):
            c.remove_edge(eid)
    return c


def is_inclusion_minimal(dual: MulticutDual) -> bool:
    return not any(dual.removable(e) for e in dual.edges)


def remove_crossed_faces(dual: MulticutDual, F_star) -> MulticutDual:
    """C - F*: drop vertices inside F* faces and every edge that enters one."""
    if isinstance(F_star, CrossedFaces):
        F_star = F_star.F_star
    F_star = frozenset(F_star)
    if any(f >= len(dual.embedding.faces) or f < 0 for f in F_star):
        raise InstanceError("face set does not belong to this embedding")
    c = dual.copy()
    doomed = {vid for vid, vx in c.vertices.items() if vx.face in F_star}
    keep = {vid: (vx.face, vx.sectors[0]) for vid, vx in c.vertices.items() if vid not in doomed}
    for eid in sorted(c.edges):
        if any(v in doomed for v in c.edges[eid].ends):
            c.remove_edge(eid)
    for vid in doomed:
        c.vertices.pop(vid, None)
    # survivors that lost every edge stay as isolated vertices
    for vid, (face, sector) in keep.items():
        if vid not in c.vertices:
            c.vertices[vid] = _Vertex(face, [], [sector])
    return c


def face_augmented(dual: MulticutDual) -> tuple[Graph, dict]:
    """C plus one vertex per face adjacent to the vertices on that face."""
    index = {vid: i for i, vid in enumerate(sorted(dual.vertices))}
    base = dual.abstract_graph()
    nxt = len(index)
    znode = {}
    es = set(base.edges)
    for f in dual.faces():
        znode[f] = nxt
        nxt += 1
    for vid, i in index.items():
        for f in dual.vertex_faces(vid):
            es.add(edge(i, znode[f]))
    return Graph(frozenset(range(nxt)), frozenset(es)), znode


# ---------------------------------------------------------------------------
# Treewidth and domination
# ---------------------------------------------------------------------------


def _elim_width(adj: dict, order) -> int:
    adj = {v: set(n) for v, n in adj.items()}
    width = 0
    for v in order:
        nb = adj.pop(v)
        width = max(width, len(nb))
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
    return width


def _min_fill_order(adj: dict) -> list:
    adj = {v: set(n) for v, n in adj.items()}
    order = []
    while adj:
        def fill(v):
            nb = list(adj[v])
            return sum(1 for a, b in itertools.combinations(nb, 2) if b not in adj[a])
        v = min(adj, key=lambda x: (fill(x), len(adj[x]), x))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        order.append(v)
    return order


def _degeneracy(adj: dict) -> int:
    adj = {v: set(n) for v, n in adj.items()}
    best = 0
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        best = max(best, len(adj[v]))
        for a in adj.pop(v):
            adj[a].discard(v)
    return best


def _tw_connected(graph: Graph) -> int:
    verts = sorted(graph.vertices)
    if len(verts) <= 1:
        return 0
    adj = {v: set(graph.adj[v]) for v in verts}
    ub = _elim_width(adj, _min_fill_order(adj))
    lb = _degeneracy(adj)
    if lb >= ub:
        return ub
    best = [ub]
    seen: dict = {}
    allv = frozenset(verts)

    def q_size(S, v):
        # vertices outside S and v reachable from v through S
        out = set()
        stack = [v]
        inside = {v}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in inside:
                    continue
                if y in S:
                    inside.add(y)
                    stack.append(y)
                else:
                    out.add(y)
        out.discard(v)
        return len(out)

    def rec(S: frozenset, width: int):
        if width >= best[0]:
            return
        rest = allv - S
        if len(rest) - 1 <= width:
            best[0] = width
            return
        if seen.get(S, best[0] + 1) <= width:
            return
        seen[S] = width
        for v in sorted(rest):
            rec(S | {v}, max(width, q_size(S, v)))
            if best[0] <= lb:
                return

    rec(frozenset(), 0)
    return best[0]


def treewidth_exact(graph: Graph, max_n: int = 20) -> int:
    """Exact treewidth; the maximum over components."""
    if graph.n > max_n:
        raise InstanceError(f"treewidth bound exceeded: n={graph.n} > {max_n}")
    return max((_tw_connected(graph.induced(c)) for c in graph.components()), default=0)


def dominating_check(graph: Graph, A: Iterable[int], r: int) -> bool:
    dist = {a: 0 for a in A}
    q = deque(sorted(dist))
    while q:
        x = q.popleft()
        if dist[x] == r:
            continue
        for y in graph.adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return len(dist) == graph.n


# ---------------------------------------------------------------------------
# Exact planar multicut
# ---------------------------------------------------------------------------


def _independent_partitions(items: list, conflict: set) -> list[list[frozenset]]:
    """Partitions into conflict-free parts where no two parts can be merged."""
    out = []

    def rec(i, parts):
        if i == len(items):
            for a, b in itertools.combinations(range(len(parts)), 2):
                if not any((x, y) in conflict for x in parts[a] for y in parts[b]):
                    return
            out.append([frozenset(p) for p in parts])
            return
        x = items[i]
        for p in parts:
            if not any((x, y) in conflict for y in p):
                p.append(x)
                rec(i + 1, parts)
                p.pop()
        parts.append([x])
        rec(i + 1, parts)
        parts.pop()

    rec(0, [])
    return out


def planar_multicut_exact(
    instance: Instance,
    F_star: Optional[CrossedFaces] = None,
    cutoff: Weight = INF,
    assume_planar: bool = False,
) -> Optional[Solution]:
    """Minimum multicut of a planar instance.

    Terminals are grouped into sets that no demand joins and that cannot be
    merged further; each grouping is one exact multiway-cut problem. F_star
    is accepted for interface compatibility and does not change the answer.
    With a finite cutoff, returns None when nothing cheaper than it exists.
    """
    if not assume_planar and not is_planar(instance.graph):
        raise InstanceError("instance is not planar")
    if not instance.demands:
        return Solution(frozenset(), 0)
    hard = [e for e, w in instance.weight.items() if w == INF]
    blob = component_labels(instance.vertices, hard)
    for a, b in sorted(instance.demands):
        if blob[a] == blob[b]:
            raise InfeasibleError(f"no finite multicut: {a} and {b} are joined by inf edges")
    members: dict = {}
    for v, b in blob.items():
        members.setdefault(b, set()).add(v)
    supers = sorted({blob[t] for d in instance.demands for t in d})
    conflict = set()
    for a, b in instance.demands:
        conflict.add((blob[a], blob[b]))
        conflict.add((blob[b], blob[a]))
    best: Optional[tuple] = None
    bound = cutoff
    for parts in _independent_partitions(supers, conflict):
        groups = [frozenset().union(*(members[s] for s in p)) for p in parts]
        res = multiway_cut(instance.vertices, instance.weight, groups, cutoff=bound)
        if res is not None and res[0] < bound:
            best, bound = res, res[0]
    if best is None:
        if cutoff == INF:
            raise InfeasibleError("no finite multicut")
        return None
    return Solution(frozenset(best[1]), best[0])


def embedding_of(instance: Instance) -> Embedding:
    if instance.rotation is not None:
        return Embedding(instance.graph, dict(instance.rotation))
    return embed(instance.graph)
