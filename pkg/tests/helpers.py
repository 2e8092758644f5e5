"""Instance builders and brute-force references that share no code with the package."""

from __future__ import annotations

import itertools
import random

import networkx as nx

from nearplanar.core import INF, Instance
from nearplanar.generate import GenConfig, generate


def make(n, edges, terminals=(), demands=(), **kw) -> Instance:
    es = [(e[0], e[1], e[2] if len(e) == 3 else 1) for e in edges]
    terms = set(terminals) | {x for d in demands for x in d}
    return Instance(
        vertices=frozenset(range(n)),
        edges=tuple(es),
        terminals=frozenset(terms),
        demands=frozenset(tuple(sorted(d)) for d in demands),
        **kw,
    )


def path3(weights=(1, 1)) -> Instance:
    return make(3, [(0, 1, weights[0]), (1, 2, weights[1])], demands=[(0, 2)])


def k5(demands=((0, 1),), crossing=True) -> Instance:
    es = list(itertools.combinations(range(5), 2))
    kw = {"crossings": frozenset({((0, 2), (1, 3))})} if crossing else {}
    return make(5, es, demands=demands, **kw)


def nx_graph(inst: Instance, drop=()) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(inst.vertices)
    drop = set(drop)
    g.add_edges_from((u, v) for u, v, _ in inst.edges if (u, v) not in drop)
    return g


def brute_separates(inst: Instance, S) -> bool:
    g = nx_graph(inst, S)
    return all(not nx.has_path(g, a, b) for a, b in inst.demands)


def brute_min_multicut(inst: Instance):
    """Weight of a minimum multicut by trying every finite edge subset, or None."""
    finite = [(u, v) for u, v, w in inst.edges if w != INF]
    wt = {(u, v): w for u, v, w in inst.edges}
    best = None
    for k in range(len(finite) + 1):
        for S in itertools.combinations(finite, k):
            w = sum(wt[e] for e in S)
            if best is not None and w >= best:
                continue
            if brute_separates(inst, S):
                best = w
    return best


def kplanar_config(seed: int) -> GenConfig:
    """Unweighted near-planar shapes: n <= 12, at most 14 edges, t <= 4, pi <= 2."""
    r = random.Random(seed)
    return GenConfig(
        n=r.randint(4, 12),
        density=r.choice([0.3, 0.5, 0.7, 0.9]),
        t=r.randint(2, 4),
        pi=r.randint(0, 2),
        max_edges=14,
    )


def crossing_config(seed: int) -> GenConfig:
    """Weighted drawings: at most 14 edges, 1..3 crossing pairs, weights 1..5 and inf."""
    r = random.Random(10_000 + seed)
    return GenConfig(
        n=r.randint(6, 10),
        density=r.choice([0.4, 0.5, 0.6]),
        t=r.randint(2, 4),
        crossings=r.randint(1, 3),
        max_weight=5,
        inf_rate=0.1,
        max_edges=14,
    )


def planar_config(seed: int) -> GenConfig:
    r = random.Random(20_000 + seed)
    return GenConfig(
        n=r.randint(3, 10),
        density=r.choice([0.3, 0.5, 0.7, 1.0]),
        t=r.randint(2, min(4, 3 + r.randint(0, 1))),
        max_weight=r.choice([1, 5]),
        inf_rate=r.choice([0.0, 0.1]),
        max_edges=14,
    )


def kplanar_instance(seed: int) -> Instance:
    return generate(seed, kplanar_config(seed))


def crossing_instance(seed: int) -> Instance:
    return generate(seed, crossing_config(seed))


def planar_instance(seed: int) -> Instance:
    cfg = planar_config(seed)
    if cfg.t > cfg.n:
        cfg = GenConfig(**{**cfg.__dict__, "t": cfg.n})
    return generate(seed, cfg)


def random_connected_edges(rng: random.Random, n: int, p: float = 0.3) -> list:
    """A random spanning tree on range(n) plus each other pair with probability p."""
    es = {tuple(sorted((i, rng.randrange(i)))) for i in range(1, n)}
    for pair in itertools.combinations(range(n), 2):
        if rng.random() < p:
            es.add(pair)
    return sorted(es)


def brute_relevant(n: int, edges, Y1, Y2):
    """(lambda, maximum tight side) for (Y1, Y2) by enumerating every vertex set between them."""
    Y1, Y2 = frozenset(Y1), frozenset(Y2)
    free = sorted(set(range(n)) - Y1 - Y2)
    sides = []
    for k in range(len(free) + 1):
        for extra in itertools.combinations(free, k):
            Y = Y1 | frozenset(extra)
            sides.append((sum(1 for u, v in edges if (u in Y) != (v in Y)), Y))
    lam = min(b for b, _ in sides)
    tight = [Y for b, Y in sides if b == lam]
    top = max(tight, key=len)
    assert all(Y <= top for Y in tight), "maximum is not unique"
    return lam, top
