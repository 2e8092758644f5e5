"""Seeded generators for near-planar Multicut instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .core import INF, Graph, Instance, InstanceError, edge
from .cuts import component_labels
from .planar import _interleaves, embed, is_planar


@dataclass(frozen=True)
class GenConfig:
    n: int = 8
    density: float = 0.5  # fraction of the 3n-6 planar edge budget
    t: int = 3
    pi: int = 0
    crossings: int = 0
    max_weight: int = 1
    inf_rate: float = 0.0
    demand_rate: float = 0.6
    max_edges: Optional[int] = None

    def validate(self) -> None:
        if not 2 <= self.n <= 64:
            raise InstanceError("n must lie in 2..64")
        if not 0 <= self.pi <= 4:
            raise InstanceError("pi must lie in 0..4")
        if not 0 <= self.crossings <= 3:
            raise InstanceError("crossings must lie in 0..3")
        if self.pi and self.crossings:
            raise InstanceError("choose either pi edges or crossings")
        if not 2 <= self.t <= self.n:
            raise InstanceError("t must lie in 2..n")
        if not 0 < self.density <= 1:
            raise InstanceError("density must lie in (0, 1]")
        if self.max_weight < 1:
            raise InstanceError("max_weight must be positive")
        if not 0 <= self.inf_rate < 1:
            raise InstanceError("inf_rate must lie in [0, 1)")


def planar_base(rng: random.Random, n: int, target: int) -> frozenset:
    """Random spanning tree, then random pairs kept while the graph stays planar."""
    verts = frozenset(range(n))
    order = list(range(n))
    rng.shuffle(order)
    es = {edge(order[i], order[rng.randrange(i)]) for i in range(1, n)}
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in es]
    rng.shuffle(pairs)
    for p in pairs:
        if len(es) >= target:
            break
        if is_planar(Graph(verts, frozenset(es | {p}))):
            es.add(p)
    return frozenset(es)


def _crossing_chords(rng: random.Random, n: int, es: frozenset, k: int) -> list:
    """Up to k crossing chord pairs, each inside its own face of the base."""
    emb = embed(Graph(frozenset(range(n)), es))
    faces = list(range(len(emb.faces)))
    rng.shuffle(faces)
    taken = set(es)
    out = []
    for fid in faces:
        if len(out) == k:
            break
        walk = [u for u, _ in emb.faces[fid].darts]
        # positions of first occurrences keep the cyclic order of the walk
        seen, cyc = set(), []
        for v in walk:
            if v not in seen:
                seen.add(v)
                cyc.append(v)
        quads = [q for q in itertools.combinations(range(len(cyc)), 4)]
        rng.shuffle(quads)
        for i, j, a, b in quads:
            p, q, r, s = cyc[i], cyc[j], cyc[a], cyc[b]
            e1, e2 = edge(p, r), edge(q, s)
            if e1 in taken or e2 in taken:
                continue
            # the walk may revisit a vertex; insist that p, q, r, s each occur once
            if any(walk.count(x) != 1 for x in (p, q, r, s)):
                continue
            # the face must be the one recovered from vertex incidences alone
            hosts = [
                i
                for i, f in enumerate(emb.faces)
                if {p, q, r, s} <= f.vertices and _interleaves(f, frozenset((e1, e2)), [(e1, e2)])
            ]
            if hosts[0] != fid:
                continue
            taken |= {e1, e2}
            out.append((e1, e2))
            break
    return out


def generate(seed: int, config: GenConfig) -> Instance:
    config.validate()
    rng = random.Random(seed)
    n = config.n
    budget = max(n - 1, 3 * n - 6)
    target = max(n - 1, round(config.density * budget))
    if config.max_edges is not None:
        target = min(target, config.max_edges - config.pi - 2 * config.crossings)
        target = max(target, n - 1)
    es = planar_base(rng, n, target)
    e_pi: set = set()
    crossings: list = []
    if config.pi:
        free = [p for p in itertools.combinations(range(n), 2) if p not in es]
        rng.shuffle(free)
        e_pi = set(free[: config.pi])
    if config.crossings:
        crossings = _crossing_chords(rng, n, es, config.crossings)
    all_edges = sorted(es | e_pi | {e for p in crossings for e in p})
    weights = {}
    for e in all_edges:
        if config.inf_rate and rng.random() < config.inf_rate:
            weights[e] = INF
        else:
            weights[e] = rng.randint(1, config.max_weight)
    terminals = sorted(rng.sample(range(n), config.t))
    demands = [d for d in itertools.combinations(terminals, 2) if rng.random() < config.demand_rate]
    if not demands:
        demands = [tuple(rng.sample(terminals, 2))]
    _repair_infinite(weights, n, demands, config.max_weight)
    used = frozenset(v for d in demands for v in d)
    return Instance(
        vertices=frozenset(range(n)),
        edges=tuple((u, v, w) for (u, v), w in sorted(weights.items())),
        terminals=frozenset(terminals) | used,
        demands=frozenset(edge(*d) for d in demands),
        e_pi=frozenset(e_pi),
        crossings=frozenset(crossings),
    )


def _repair_infinite(weights: dict, n: int, demands, max_weight: int) -> None:
    """Make infinite edges finite, lowest first, until a finite multicut exists."""
    while True:
        hard = sorted(e for e, w in weights.items() if w == INF)
        label = component_labels(range(n), hard)
        bad = [d for d in demands if label[d[0]] == label[d[1]]]
        if not bad:
            return
        weights[hard[0]] = max_weight
