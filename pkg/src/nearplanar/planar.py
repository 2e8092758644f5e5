"""Planarity, rotation-system embeddings, planarizing sets and drawings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional

import networkx as nx

from .core import Edge, Graph, Instance, InstanceError, edge


class PlanarizationError(InstanceError):
    """No planarizing edge set within the allowed size."""


@dataclass(frozen=True)
class NonPlanar:
    witness: frozenset  # edges of a Kuratowski subdivision


@dataclass(frozen=True)
class Face:
    darts: tuple
    vertices: frozenset

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(edge(u, v) for u, v in self.darts)


class Embedding:
    """A rotation system and the faces it induces.

    ``rotation[v]`` lists the neighbours of v in clockwise order. Faces are
    traced by following, from dart (u, v), the neighbour after u at v. Each
    component is embedded on its own; their outer faces (longest walk, ties to
    the smallest dart) are merged into one face that also holds every
    isolated vertex, so Euler's formula reads n - m + f = 1 + c.
    """

    def __init__(self, graph: Graph, rotation: dict):
        self.graph = graph
        self.rotation = {v: tuple(rotation.get(v, ())) for v in sorted(graph.vertices)}
        for v, nbrs in self.rotation.items():
            if sorted(nbrs) != sorted(graph.adj[v]):
                raise InstanceError(f"rotation at {v} does not list its neighbours")
        self._trace()

    def _trace(self):
        pos = {v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in self.rotation.items()}
        darts = sorted((u, v) for u in self.rotation for v in self.rotation[u])
        seen = set()
        walks = []
        for d in darts:
            if d in seen:
                continue
            walk = []
            x = d
            while x not in seen:
                seen.add(x)
                walk.append(x)
                u, v = x
                rot = self.rotation[v]
                x = (v, rot[(pos[v][u] + 1) % len(rot)])
            walks.append(tuple(walk))
        comp = self.graph.component_map()
        by_comp: dict[int, list] = {}
        for w in walks:
            by_comp.setdefault(comp[w[0][0]], []).append(w)
        outer_parts = []
        inner = []
        for c in sorted(by_comp):
            ws = by_comp[c]
            # ties go to the walk with the smallest starting dart
            longest = max(len(w) for w in ws)
            outer = min(w for w in ws if len(w) == longest)
            outer_parts.append(outer)
            inner.extend(w for w in ws if w is not outer)
        isolated = frozenset(v for v in self.graph.vertices if not self.graph.adj[v])
        faces = [Face(w, frozenset(a for a, _ in w)) for w in inner]
        merged = tuple(d for w in outer_parts for d in w)
        faces.append(Face(merged, frozenset(a for a, _ in merged) | isolated))
        faces.sort(key=lambda f: (0, min(f.darts)) if f.darts else (1, ()))
        self.faces: tuple[Face, ...] = tuple(faces)
        self.dart_face = {d: i for i, f in enumerate(self.faces) for d in f.darts}
        self.outer_face = next(i for i, f in enumerate(self.faces) if f.darts == merged)
        n, m = self.graph.n, self.graph.m
        c = len(self.graph.components())
        if n - m + len(self.faces) != 1 + c:
            raise InstanceError("rotation system is not a plane embedding")

    def faces_of_vertex(self, v: int) -> frozenset:
        return frozenset(i for i, f in enumerate(self.faces) if v in f.vertices)

    def edge_faces(self, e: Edge) -> tuple[int, int]:
        u, v = e
        return self.dart_face[(u, v)], self.dart_face[(v, u)]

    def euler_ok(self) -> bool:
        n, m = self.graph.n, self.graph.m
        return n - m + len(self.faces) == 1 + len(self.graph.components())

    @classmethod
    def from_records(cls, graph: Graph, records) -> "Embedding":
        return cls(graph, dict(records))


def _nx_graph(graph: Graph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(sorted(graph.vertices))
    g.add_edges_from(sorted(graph.edges))
    return g


@lru_cache(maxsize=1 << 16)
def _is_planar(vertices: frozenset, edges: frozenset) -> bool:
    return nx.check_planarity(_nx_graph(Graph(vertices, edges)))[0]


def is_planar(graph: Graph) -> bool:
    return _is_planar(graph.vertices, graph.edges)


def planarity_check(graph: Graph):
    """Embedding of a planar graph, or a Kuratowski witness."""
    ok, cert = nx.check_planarity(_nx_graph(graph), counterexample=True)
    if not ok:
        return NonPlanar(frozenset(edge(u, v) for u, v in cert.edges()))
    rotation = {v: tuple(cert.neighbors_cw_order(v)) for v in cert.nodes}
    return Embedding(graph, rotation)


def embed(graph: Graph) -> Embedding:
    res = planarity_check(graph)
    if isinstance(res, NonPlanar):
        raise InstanceError("graph is not planar")
    return res


# ---------------------------------------------------------------------------
# Planarizing edge sets
# ---------------------------------------------------------------------------


def find_planarizing_edges(graph: Graph, pi_max: int = 4) -> Optional[frozenset]:
    """Smallest edge set whose deletion leaves a planar graph, or None.

    Sizes are tried in increasing order, subsets lexicographically. Every
    candidate must hit the Kuratowski witness of the whole graph, and sizes
    that leave more than 3n - 6 edges are skipped.
    """
    first = planarity_check(graph)
    if not isinstance(first, NonPlanar):
        return frozenset()
    witness = first.witness
    es = sorted(graph.edges)
    n = graph.n
    for k in range(1, pi_max + 1):
        if n >= 3 and len(es) - k > 3 * n - 6:
            continue
        for combo in itertools.combinations(es, k):
            if witness.isdisjoint(combo):
                continue
            if is_planar(graph.remove_edges(combo)):
                return frozenset(combo)
    return None


def planarization_number(graph: Graph, pi_max: int = 4) -> int:
    found = find_planarizing_edges(graph, pi_max)
    if found is None:
        raise PlanarizationError(f"graph is not planar after deleting {pi_max} edges")
    return len(found)


def reduce_planarizing_set(graph: Graph, e_pi: Iterable[Edge]) -> frozenset:
    """Drop edges of e_pi that join distinct components of graph minus e_pi."""
    e_pi = set(e_pi)
    changed = True
    while changed:
        changed = False
        label = graph.remove_edges(e_pi).component_map()
        for e in sorted(e_pi):
            if label[e[0]] != label[e[1]]:
                e_pi.discard(e)
                changed = True
                break
    return frozenset(e_pi)


# ---------------------------------------------------------------------------
# Duals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualGraph:
    """One vertex per face; dual edge i crosses primal edge ``primal[i]``."""

    faces: tuple
    edges: tuple  # (face, face, primal edge)

    @property
    def n(self) -> int:
        return len(self.faces)

    def loops(self) -> int:
        return sum(1 for a, b, _ in self.edges if a == b)


def faces_and_dual(embedding: Embedding) -> DualGraph:
    out = []
    for e in sorted(embedding.graph.edges):
        a, b = embedding.edge_faces(e)
        out.append((min(a, b), max(a, b), e))
    return DualGraph(tuple(range(len(embedding.faces))), tuple(out))


# ---------------------------------------------------------------------------
# Drawings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Drawing:
    base: Instance
    crossing_pairs: frozenset
    rotation: Optional[tuple] = None  # embedding of the uncrossed part, if known

    def __post_init__(self):
        for e, f in self.crossing_pairs:
            if set(e) & set(f):
                raise InstanceError(f"edges {e} and {f} share an endpoint")
            if e not in self.base.edge_set or f not in self.base.edge_set:
                raise InstanceError("crossing pair names an unknown edge")

    @classmethod
    def of(cls, instance: Instance) -> "Drawing":
        return cls(instance, instance.crossings, instance.rotation)

    @cached_property
    def E_cr(self) -> frozenset:
        return frozenset(x for p in self.crossing_pairs for x in p)

    @property
    def cr_bar(self) -> int:
        return len(self.E_cr)

    @cached_property
    def uncrossed(self) -> Graph:
        return self.base.graph.remove_edges(self.E_cr)

    def embedding(self) -> Embedding:
        if self.rotation is not None:
            return Embedding(self.uncrossed, dict(self.rotation))
        return embed(self.uncrossed)


@dataclass(frozen=True)
class CrossedFaces:
    F_star: frozenset
    placement: tuple  # (cluster of crossing edges, face id)


def crossing_clusters(pairs: Iterable) -> list[frozenset]:
    """Groups of E_cr edges linked through crossings, in canonical order."""
    g = nx.Graph()
    for e, f in sorted(pairs):
        g.add_edge(e, f)
    return sorted((frozenset(c) for c in nx.connected_components(g)), key=min)


def _interleaves(face: Face, cluster: frozenset, pairs) -> bool:
    """Whether every crossing pair of the cluster alternates along the face."""
    walk = [u for u, _ in face.darts]
    for e, f in pairs:
        if e not in cluster:
            continue
        ends = set(e) | set(f)
        if any(walk.count(x) != 1 for x in ends):
            continue  # repeated vertices admit either order
        seq = [x for x in walk if x in ends]
        marks = [x in e for x in seq]
        if marks not in ([True, False, True, False], [False, True, False, True]):
            return False
    return True


def crossed_faces(drawing: Drawing, embedding: Optional[Embedding] = None) -> CrossedFaces:
    """Faces of the uncrossed part that host a crossing.

    Crossing edges meet no uncrossed edge, so every linked group of them lies
    inside one face whose boundary touches all their endpoints. The lowest
    such face in which the crossing pairs alternate is chosen, falling back
    to the lowest common face.
    """
    if embedding is None:
        embedding = drawing.embedding()
    placement = []
    for cluster in crossing_clusters(drawing.crossing_pairs):
        ends = {v for e in cluster for v in e}
        common = None
        for v in ends:
            fs = embedding.faces_of_vertex(v)
            common = fs if common is None else common & fs
        if not common:
            raise InstanceError("crossing pair not embeddable in any face")
        good = [f for f in sorted(common) if _interleaves(embedding.faces[f], cluster, drawing.crossing_pairs)]
        placement.append((cluster, good[0] if good else min(common)))
    return CrossedFaces(frozenset(f for _, f in placement), tuple(placement))


# ---------------------------------------------------------------------------
# Crossing-minimal drawings of tiny graphs
# ---------------------------------------------------------------------------


def _planarize(graph: Graph, pairs, orders) -> tuple[Graph, dict]:
    """Replace each crossing by a dummy vertex; orders fix dummies along edges."""
    nxt = max(graph.vertices, default=-1) + 1
    dummy = {}
    for p in pairs:
        dummy[p] = nxt
        nxt += 1
    edges = set(graph.edges)
    for e, seq in orders.items():
        edges.discard(e)
        chain = [e[0]] + [dummy[p] for p in seq] + [e[1]]
        for a, b in zip(chain, chain[1:]):
            edges.add(edge(a, b))
    return Graph(graph.vertices | frozenset(dummy.values()), frozenset(edges)), dummy


def tiny_min_crossing_drawing(
    graph: Graph, max_cr: int = 3, max_n: int = 8
) -> Optional[Drawing]:
    """Fewest-crossing drawing of a tiny graph by exhaustive planarization."""
    if graph.n > max_n:
        raise InstanceError(f"graph too large for exhaustive drawing: n={graph.n} > {max_n}")
    if max_cr > 3:
        raise InstanceError("max_cr is limited to 3")
    es = sorted(graph.edges)
    pairs = [(e, f) for e, f in itertools.combinations(es, 2) if not set(e) & set(f)]
    n, m = graph.n, graph.m
    inst = Instance(
        vertices=graph.vertices,
        edges=tuple((u, v, 1) for u, v in es),
        terminals=frozenset(),
        demands=frozenset(),
    )
    for k in range(max_cr + 1):
        # planarized graph has n + k vertices and m + 2k edges
        if n + k >= 3 and m + 2 * k > 3 * (n + k) - 6:
            continue
        for chosen in itertools.combinations(pairs, k):
            per_edge: dict = {}
            for p in chosen:
                for e in p:
                    per_edge.setdefault(e, []).append(p)
            keys = sorted(per_edge)
            for perm in itertools.product(*(itertools.permutations(per_edge[e]) for e in keys)):
                orders = dict(zip(keys, perm))
                pg, dummy = _planarize(graph, chosen, orders)
                if not is_planar(pg):
                    continue
                res = embed(pg)
                crossed = {x for p in chosen for x in p}
                keep = graph.remove_edges(crossed)
                rotation = {
                    v: tuple(u for u in res.rotation[v] if u in graph.vertices and edge(u, v) in keep.edges)
                    for v in sorted(graph.vertices)
                }
                return Drawing(inst, frozenset(chosen), tuple(sorted(rotation.items())))
    return None
