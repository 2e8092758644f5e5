"""Flow and cut primitives plus a brute-force multicut oracle."""

from __future__ import annotations

import itertools
import math
from collections import deque
from typing import Iterable, Mapping, Optional

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

UNREACHABLE = math.inf


class OracleLimitError(InstanceError):
    """The oracle was asked to enumerate beyond its configured bound."""


# ---------------------------------------------------------------------------
# Union-find labelling
# ---------------------------------------------------------------------------


def component_labels(vertices: Iterable[int], edges: Iterable[Edge]) -> dict[int, int]:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return {v: find(v) for v in parent}


def verify_multicut(instance: Instance, S: Iterable[Edge]) -> bool:
    S = frozenset(edge(*e) for e in S)
    unknown = S - instance.edge_set
    if unknown:
        raise InstanceError(f"unknown edge {min(unknown)} in cut set")
    label = component_labels(instance.vertices, instance.edge_set - S)
    return all(label[a] != label[b] for a, b in instance.demands)


# ---------------------------------------------------------------------------
# Max flow (Edmonds-Karp on an undirected capacitated graph)
# ---------------------------------------------------------------------------

_SRC = ("source",)
_SNK = ("sink",)


class _Flow:
    """Residual network with Y1 contracted to a source and Y2 to a sink."""

    def __init__(self, vertices, capacities: Mapping[Edge, Weight], Y1, Y2):
        self.Y1, self.Y2 = frozenset(Y1), frozenset(Y2)
        if self.Y1 & self.Y2:
            raise InstanceError("source and sink sets overlap")
        self.node = {}
        for v in vertices:
            self.node[v] = _SRC if v in self.Y1 else _SNK if v in self.Y2 else v
        res: dict = {x: {} for x in set(self.node.values()) | {_SRC, _SNK}}
        for (u, v), c in capacities.items():
            a, b = self.node[u], self.node[v]
            if a == b or c == 0:
                continue
            res[a][b] = res[a].get(b, 0) + c
            res[b][a] = res[b].get(a, 0) + c
        self.res = res
        self.value: Weight = 0
        self._run()

    def _augment_once(self) -> Weight:
        res = self.res
        prev = {_SRC: None}
        q = deque([_SRC])
        while q and _SNK not in prev:
            x = q.popleft()
            for y, c in res[x].items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    q.append(y)
        if _SNK not in prev:
            return 0
        path = []
        y = _SNK
        while prev[y] is not None:
            path.append((prev[y], y))
            y = prev[y]
        b = min(res[x][y] for x, y in path)
        if b == INF:
            return INF
        for x, y in path:
            res[x][y] -= b
            res[y][x] += b
        return b

    def _run(self):
        while True:
            b = self._augment_once()
            if b == 0:
                return
            self.value += b
            if b == INF:
                return

    def source_reach(self) -> frozenset:
        seen = {_SRC}
        q = deque([_SRC])
        while q:
            x = q.popleft()
            for y, c in self.res[x].items():
                if c > 0 and y not in seen:
                    seen.add(y)
                    q.append(y)
        return frozenset(v for v, x in self.node.items() if x in seen)

    def sink_reach(self) -> frozenset:
        """Vertices from which the sink is reachable in the residual network."""
        seen = {_SNK}
        q = deque([_SNK])
        while q:
            y = q.popleft()
            for x in self.res[y]:
                if x not in seen and self.res[x].get(y, 0) > 0:
                    seen.add(x)
                    q.append(x)
        return frozenset(v for v, x in self.node.items() if x in seen)


def max_flow(
    vertices: Iterable[int],
    capacities: Mapping[Edge, Weight],
    Y1: Iterable[int],
    Y2: Iterable[int],
) -> tuple[Weight, frozenset, frozenset]:
    """Return (value, minimal source side, maximal source side)."""
    vertices = frozenset(vertices)
    Y1, Y2 = frozenset(Y1), frozenset(Y2)
    if not Y1 or not Y2:
        return 0, Y1, vertices - Y2
    fl = _Flow(vertices, capacities, Y1, Y2)
    if fl.value == INF:
        return INF, fl.source_reach(), vertices - fl.sink_reach()
    return fl.value, fl.source_reach(), vertices - fl.sink_reach()


def _unit(graph: Graph) -> dict[Edge, int]:
    return {e: 1 for e in graph.edges}


def min_cut(
    graph: Graph, Y1: Iterable[int], Y2: Iterable[int]
) -> tuple[int, frozenset, frozenset]:
    """Cardinality minimum Y1-Y2 edge cut: (value, cut edges, source side)."""
    value, side, _ = max_flow(graph.vertices, _unit(graph), Y1, Y2)
    return value, graph.boundary(side), side


def lam(graph: Graph, Y1: Iterable[int], Y2: Iterable[int]) -> int:
    return max_flow(graph.vertices, _unit(graph), Y1, Y2)[0]


def relevant_set(
    graph: Graph,
    Y1: Iterable[int],
    Y2: Iterable[int],
    require_connected: bool = True,
) -> frozenset:
    """Largest Y3 with Y1 <= Y3, Y3 disjoint from Y2 and d(Y3) = lambda(Y1, Y2).

    Everything that cannot reach Y2 in the residual network of a maximum
    flow. Uniqueness follows from submodularity and does not need a
    connected graph; the check is kept as the default contract.
    """
    Y1, Y2 = frozenset(Y1), frozenset(Y2)
    if Y1 & Y2:
        raise InstanceError("Y1 and Y2 must be disjoint")
    if not Y1 <= graph.vertices or not Y2 <= graph.vertices:
        raise InstanceError("query sets must lie in the graph")
    if require_connected and not graph.is_connected():
        raise InstanceError("relevant sets are only defined on connected graphs here")
    return max_flow(graph.vertices, _unit(graph), Y1, Y2)[2]


def cut_distance(graph: Graph, S0: Iterable[Edge], Y1: Iterable[int], Y2: Iterable[int]):
    """Fewest S0 edges on a Y1-Y2 path (0/1 BFS); UNREACHABLE if none."""
    S0 = frozenset(S0)
    Y2 = frozenset(Y2)
    dist = {v: 0 for v in Y1}
    dq = deque(sorted(dist))
    done = set()
    while dq:
        x = dq.popleft()
        if x in done:
            continue
        done.add(x)
        if x in Y2:
            return dist[x]
        for y in graph.adj[x]:
            w = 1 if edge(x, y) in S0 else 0
            nd = dist[x] + w
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                if w:
                    dq.append(y)
                else:
                    dq.appendleft(y)
    return UNREACHABLE


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


def _check_finite(instance: Instance) -> None:
    hard = [e for e, w in instance.weight.items() if w == INF]
    label = component_labels(instance.vertices, hard)
    for a, b in sorted(instance.demands):
        if label[a] == label[b]:
            raise InfeasibleError(f"no finite multicut: {a} and {b} are joined by inf edges")


def _enumerate(instance: Instance) -> list[tuple[Weight, tuple]]:
    finite = sorted(e for e, w in instance.weight.items() if w != INF)
    hard = [e for e, w in instance.weight.items() if w == INF]
    demands = sorted(instance.demands)
    out = []
    for mask in range(1 << len(finite)):
        kept = list(hard)
        cut = []
        for i, e in enumerate(finite):
            (cut if mask >> i & 1 else kept).append(e)
        label = component_labels(instance.vertices, kept)
        if all(label[a] != label[b] for a, b in demands):
            out.append((instance.cost(cut), tuple(cut)))
    return out


def _branch(instance: Instance) -> tuple[Weight, tuple]:
    w = instance.weight
    demands = sorted(instance.demands)
    best: list = [INF, None]

    def unseparated_path(removed: frozenset):
        live = instance.graph.remove_edges(removed)
        for a, b in demands:
            prev = {a: None}
            q = deque([a])
            while q and b not in prev:
                x = q.popleft()
                for y in sorted(live.adj[x]):
                    if y not in prev:
                        prev[y] = x
                        q.append(y)
            if b in prev:
                path = []
                y = b
                while prev[y] is not None:
                    path.append(edge(prev[y], y))
                    y = prev[y]
                return path[::-1]
        return None

    def lower_bound(removed, forbidden):
        live = instance.graph.remove_edges(removed)
        caps = {e: (INF if e in forbidden else w[e]) for e in live.edges}
        lb = 0
        for a, b in demands:
            lb = max(lb, max_flow(live.vertices, caps, {a}, {b})[0])
        return lb

    def rec(removed: frozenset, forbidden: frozenset, cost):
        if cost > best[0]:
            return
        path = unseparated_path(removed)
        if path is None:
            key = (cost, tuple(sorted(removed)))
            if best[1] is None or key < (best[0], best[1]):
                best[0], best[1] = key
            return
        if cost + lower_bound(removed, forbidden) > best[0]:
            return
        fixed = set(forbidden)
        for e in path:
            if e not in fixed and w[e] != INF:
                rec(removed | {e}, frozenset(fixed), cost + w[e])
            fixed.add(e)

    rec(frozenset(), frozenset(), 0)
    if best[1] is None:
        raise InfeasibleError("no finite multicut")
    return best[0], best[1]


def oracle_min_multicut(
    instance: Instance, mode: str = "auto", max_edges: int = 24
) -> Solution:
    """Exact minimum multicut by exhaustive search.

    ``enumerate`` walks every subset of finite edges and breaks ties by the
    lexicographically smallest sorted edge list. ``branch`` branches on the
    edges of an unseparated demand path; it agrees on weight.
    """
    _check_finite(instance)
    finite = sum(1 for w in instance.weight.values() if w != INF)
    if mode == "auto":
        mode = "enumerate" if finite <= min(max_edges, 16) else "branch"
    if mode == "enumerate":
        if finite > max_edges:
            raise OracleLimitError(f"oracle bound exceeded: {finite} finite edges > {max_edges}")
        weight, cut = min(_enumerate(instance))
    elif mode == "branch":
        weight, cut = _branch(instance)
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    return Solution(frozenset(cut), weight)


def oracle_all_minimum(instance: Instance, max_edges: int = 20) -> list[frozenset]:
    """Every minimum-weight multicut, in lexicographic order."""
    _check_finite(instance)
    finite = sum(1 for w in instance.weight.values() if w != INF)
    if finite > max_edges:
        raise OracleLimitError(f"oracle bound exceeded: {finite} finite edges > {max_edges}")
    sols = _enumerate(instance)
    best = min(s[0] for s in sols)
    return [frozenset(c) for wgt, c in sorted(sols) if wgt == best]


def oracle_min_multicut_of(vertices, weights: Mapping[Edge, Weight], demands) -> Weight:
    """Weight-only oracle on raw data; used by cross-checks."""
    inst = Instance(
        vertices=frozenset(vertices),
        edges=tuple((u, v, w) for (u, v), w in weights.items()),
        terminals=frozenset(x for d in demands for x in d),
        demands=frozenset(demands),
    )
    return oracle_min_multicut(inst).weight


def all_subsets(items, max_size: Optional[int] = None):
    items = sorted(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(top + 1):
        yield from itertools.combinations(items, k)
