"""Instance model, demand-graph analysis and the line-based instance format."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

Weight = Union[int, float]
Edge = tuple[int, int]

# Saturating sentinel; any sum involving it stays INF.
INF = math.inf


class InstanceError(ValueError):
    """Malformed input or a violated instance invariant."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleError(RuntimeError):
    """No multicut of finite weight exists."""


class InternalConsistencyError(RuntimeError):
    """A proven invariant failed at runtime."""


def edge(u: int, v: int) -> Edge:
    if u == v:
        raise InstanceError(f"self-loop at {u}")
    return (u, v) if u < v else (v, u)


def fmt_weight(w: Weight) -> str:
    return "inf" if w == INF else str(int(w))


def total_weight(weights: Mapping[Edge, Weight], S: Iterable[Edge]) -> Weight:
    return sum((weights[e] for e in S), 0)


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on labelled vertices."""

    vertices: frozenset
    edges: frozenset

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[Edge]) -> "Graph":
        es = frozenset(edge(u, v) for u, v in edges)
        vs = frozenset(vertices)
        for u, v in es:
            if u not in vs or v not in vs:
                raise InstanceError(f"edge {u}-{v} has an endpoint outside the vertex set")
        return cls(vs, es)

    @cached_property
    def adj(self) -> dict[int, frozenset]:
        nb: dict[int, set] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return {v: frozenset(s) for v, s in nb.items()}

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def remove_edges(self, S: Iterable[Edge]) -> "Graph":
        return Graph(self.vertices, self.edges - frozenset(S))

    def induced(self, V: Iterable[int]) -> "Graph":
        V = frozenset(V) & self.vertices
        return Graph(V, frozenset(e for e in self.edges if e[0] in V and e[1] in V))

    def boundary(self, Y: Iterable[int]) -> frozenset:
        """Edges with exactly one endpoint in Y."""
        Y = frozenset(Y)
        return frozenset(e for e in self.edges if (e[0] in Y) != (e[1] in Y))

    def components(self) -> list[frozenset]:
        """Connected components, ordered by their smallest vertex."""
        seen: set = set()
        comps = []
        for s in sorted(self.vertices):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def component_map(self) -> dict[int, int]:
        label = {}
        for i, comp in enumerate(self.components()):
            for v in comp:
                label[v] = i
        return label

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """A Multicut instance: weighted graph, terminals and demand pairs.

    Optional annotations ride along: ``e_pi`` marks edges whose removal is
    claimed to leave a planar graph, ``crossings`` lists crossing edge pairs
    of a drawing, ``rotation`` is a clockwise neighbour order per vertex.
    """

    vertices: frozenset
    edges: tuple
    terminals: frozenset
    demands: frozenset
    e_pi: frozenset = frozenset()
    crossings: frozenset = frozenset()
    rotation: Optional[tuple] = None

    def __post_init__(self):
        seen = set()
        canon = []
        for u, v, w in self.edges:
            e = edge(u, v)
            if e in seen:
                raise InstanceError(f"duplicate edge {e[0]}-{e[1]}")
            if u not in self.vertices or v not in self.vertices:
                raise InstanceError(f"edge {u}-{v} uses an unknown vertex")
            if not (w == INF or (float(w).is_integer() and w >= 0)):
                raise InstanceError(f"weight of {e[0]}-{e[1]} must be a nonnegative integer or inf")
            seen.add(e)
            canon.append((e[0], e[1], INF if w == INF else int(w)))
        canon.sort()
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "demands", frozenset(edge(u, v) for u, v in self.demands))
        object.__setattr__(self, "e_pi", frozenset(edge(u, v) for u, v in self.e_pi))
        pairs = set()
        for e, f in self.crossings:
            e, f = edge(*e), edge(*f)
            pairs.add((e, f) if e < f else (f, e))
        object.__setattr__(self, "crossings", frozenset(pairs))
        if not self.terminals <= self.vertices:
            raise InstanceError("terminal outside the vertex set")
        for u, v in self.demands:
            if u not in self.terminals or v not in self.terminals:
                raise InstanceError(f"demand endpoint not terminal: {u}-{v}")
        for e in self.e_pi:
            if e not in seen:
                raise InstanceError(f"pi edge {e[0]}-{e[1]} is not an edge")
        for e, f in self.crossings:
            if e not in seen or f not in seen:
                raise InstanceError("crossing record names an unknown edge")
            if set(e) & set(f):
                raise InstanceError(f"adjacent edges {e} and {f} cannot cross")

    # -- views ------------------------------------------------------------

    @cached_property
    def weight(self) -> dict[Edge, Weight]:
        return {(u, v): w for u, v, w in self.edges}

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.weight)

    @cached_property
    def graph(self) -> Graph:
        return Graph(self.vertices, self.edge_set)

    @cached_property
    def demand_graph(self) -> Graph:
        return Graph(self.terminals, self.demands)

    @property
    def t(self) -> int:
        return len(self.terminals)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def cost(self, S: Iterable[Edge]) -> Weight:
        return total_weight(self.weight, S)

    # -- derived instances ------------------------------------------------

    def replace(self, **changes) -> "Instance":
        data = dict(
            vertices=self.vertices,
            edges=self.edges,
            terminals=self.terminals,
            demands=self.demands,
            e_pi=self.e_pi,
            crossings=self.crossings,
            rotation=self.rotation,
        )
        data.update(changes)
        return Instance(**data)

    def without_edges(self, S: Iterable[Edge]) -> "Instance":
        S = frozenset(S)
        return self.replace(
            edges=tuple(x for x in self.edges if (x[0], x[1]) not in S),
            e_pi=self.e_pi - S,
            crossings=frozenset(p for p in self.crossings if p[0] not in S and p[1] not in S),
            rotation=None,
        )

    def induced(self, V: Iterable[int]) -> "Instance":
        """Subinstance on V with the demand graph induced on V."""
        V = frozenset(V) & self.vertices
        keep = tuple(x for x in self.edges if x[0] in V and x[1] in V)
        kept = {(u, v) for u, v, _ in keep}
        T = self.terminals & V
        return Instance(
            vertices=V,
            edges=keep,
            terminals=T,
            demands=frozenset(d for d in self.demands if d[0] in V and d[1] in V),
            e_pi=frozenset(e for e in self.e_pi if e in kept),
            crossings=frozenset(p for p in self.crossings if p[0] in kept and p[1] in kept),
        )

    def canonical_key(self) -> tuple:
        return (
            tuple(sorted(self.vertices)),
            self.edges,
            tuple(sorted(self.terminals)),
            tuple(sorted(self.demands)),
        )


@dataclass(frozen=True)
class KPlanarContext:
    """An instance with a planarizing edge set E_pi; G0 is the planar rest."""

    base: Instance
    e_pi: frozenset
    # memo tables for flow queries on G0; not part of identity
    cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def pi(self) -> int:
        return len(self.e_pi)

    @cached_property
    def W(self) -> frozenset:
        return frozenset(v for e in self.e_pi for v in e)

    @cached_property
    def G0(self) -> Graph:
        return self.base.graph.remove_edges(self.e_pi)

    @cached_property
    def WT(self) -> frozenset:
        return self.W | self.base.terminals

    @property
    def t(self) -> int:
        return self.base.t

    @property
    def fat_threshold(self) -> int:
        return self.pi * (self.t + 1) + 1


@dataclass(frozen=True)
class Solution:
    edges: frozenset
    weight: Weight

    @classmethod
    def of(cls, instance: Instance, S: Iterable[Edge]) -> "Solution":
        S = frozenset(S)
        return cls(S, instance.cost(S))

    def sort_key(self) -> tuple:
        return (self.weight, sorted(self.edges))

    def S0(self, ctx: KPlanarContext) -> frozenset:
        return self.edges - ctx.e_pi

    def format(self) -> str:
        lines = [f"weight {fmt_weight(self.weight)}"]
        lines += [f"cut {u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def better(a: Optional[Solution], b: Optional[Solution]) -> Optional[Solution]:
    """Deterministic minimum by (weight, sorted edge list)."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a.sort_key() <= b.sort_key() else b


# ---------------------------------------------------------------------------
# Extended bicliques
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BicliqueDecomposition:
    B1: frozenset
    B2: frozenset
    I: frozenset
    X: frozenset

    @property
    def mu(self) -> int:
        return len(self.X)


def _as_biclique(H: Graph, X: frozenset) -> Optional[BicliqueDecomposition]:
    rest = H.induced(H.vertices - X)
    I = frozenset(v for v in rest.vertices if not rest.adj[v])
    core = rest.induced(rest.vertices - I)
    if not core.vertices:
        return BicliqueDecomposition(frozenset(), frozenset(), I, X)
    color: dict[int, int] = {}
    start = min(core.vertices)
    color[start] = 0
    stack = [start]
    while stack:
        x = stack.pop()
        for y in core.adj[x]:
            if y not in color:
                color[y] = 1 - color[x]
                stack.append(y)
            elif color[y] == color[x]:
                return None
    if len(color) != core.n:
        return None
    B1 = frozenset(v for v, c in color.items() if c == 0)
    B2 = frozenset(v for v, c in color.items() if c == 1)
    if core.m != len(B1) * len(B2):
        return None
    return BicliqueDecomposition(B1, B2, I, X)


def extended_biclique_distance(H: Graph) -> BicliqueDecomposition:
    """Minimum vertex deletion to an extended biclique.

    Sizes are tried in increasing order and, within a size, deletion sets in
    lexicographic order of the sorted vertex list.
    """
    order = sorted(H.vertices)
    for k in range(len(order) + 1):
        for X in itertools.combinations(order, k):
            dec = _as_biclique(H, frozenset(X))
            if dec is not None:
                return dec
    raise AssertionError("deleting every vertex always works")


def induced_demands(H: Graph, V: Iterable[int]) -> Graph:
    return H.induced(V)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"expected an integer, got {tok!r}", lineno) from None


def parse_instance(text: str) -> Instance:
    n = None
    terminals: list[int] = []
    edges: list[tuple[int, int, Weight]] = []
    e_pi: list[Edge] = []
    demands: list[Edge] = []
    crossings: list[tuple[Edge, Edge]] = []
    rotation: dict[int, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind, args = tok[0], tok[1:]
        if kind != "n" and n is None:
            raise InstanceError("the 'n' record must come first", lineno)
        if kind == "n":
            if n is not None or len(args) != 1:
                raise InstanceError("malformed 'n' record", lineno)
            n = _int(args[0], lineno)
            if n < 0:
                raise InstanceError("negative vertex count", lineno)
            continue
        ints = args if kind != "e" else args[:2]
        vals = [_int(a, lineno) for a in ints]
        for v in vals:
            if not 0 <= v < n:
                raise InstanceError(f"vertex {v} out of range", lineno)
        if kind == "t":
            if len(args) != 1:
                raise InstanceError("malformed 't' record", lineno)
            terminals.append(vals[0])
        elif kind == "e":
            if len(args) not in (3, 4) or (len(args) == 4 and args[3] != "pi"):
                raise InstanceError("malformed 'e' record", lineno)
            u, v = vals
            if u == v:
                raise InstanceError("self-loop", lineno)
            w: Weight = INF if args[2] == "inf" else _int(args[2], lineno)
            if w != INF and w < 0:
                raise InstanceError("negative weight", lineno)
            edges.append((u, v, w))
            if len(args) == 4:
                e_pi.append(edge(u, v))
        elif kind == "d":
            if len(args) != 2:
                raise InstanceError("malformed 'd' record", lineno)
            demands.append(edge(*vals))
        elif kind == "x":
            if len(args) != 4:
                raise InstanceError("malformed 'x' record", lineno)
            crossings.append((edge(vals[0], vals[1]), edge(vals[2], vals[3])))
        elif kind == "r":
            if not args:
                raise InstanceError("malformed 'r' record", lineno)
            rotation[vals[0]] = tuple(vals[1:])
        else:
            raise InstanceError(f"unknown record {kind!r}", lineno)
    if n is None:
        raise InstanceError("missing 'n' record")
    seen = set()
    for u, v, _ in edges:
        if edge(u, v) in seen:
            raise InstanceError(f"duplicate edge {min(u, v)}-{max(u, v)}")
        seen.add(edge(u, v))
    return Instance(
        vertices=frozenset(range(n)),
        edges=tuple(edges),
        terminals=frozenset(terminals),
        demands=frozenset(demands),
        e_pi=frozenset(e_pi),
        crossings=frozenset(crossings),
        rotation=tuple(sorted(rotation.items())) if rotation else None,
    )


def serialize_instance(inst: Instance) -> str:
    n = max(inst.vertices) + 1 if inst.vertices else 0
    if inst.vertices != frozenset(range(n)):
        raise InstanceError("only instances on 0..n-1 can be serialized")
    out = [f"n {n}"]
    out += [f"t {v}" for v in sorted(inst.terminals)]
    for u, v, w in inst.edges:
        tail = " pi" if (u, v) in inst.e_pi else ""
        out.append(f"e {u} {v} {fmt_weight(w)}{tail}")
    out += [f"d {u} {v}" for u, v in sorted(inst.demands)]
    out += [f"x {e[0]} {e[1]} {f[0]} {f[1]}" for e, f in sorted(inst.crossings)]
    if inst.rotation:
        out += [" ".join(map(str, ("r", v, *nbrs))) for v, nbrs in inst.rotation]
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> tuple[Weight, frozenset]:
    weight = None
    cut = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "weight" and len(tok) == 2 and weight is None:
            weight = INF if tok[1] == "inf" else _int(tok[1], lineno)
        elif tok[0] == "cut" and len(tok) == 3:
            cut.append(edge(_int(tok[1], lineno), _int(tok[2], lineno)))
        else:
            raise InstanceError(f"bad solution record {line!r}", lineno)
    if weight is None:
        raise InstanceError("solution lacks a weight header")
    return weight, frozenset(cut)
