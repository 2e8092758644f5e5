"""Exact multiway cut by isolating-cut pushing and edge branching.

Groups of vertices must end up in pairwise distinct components. For a group
the furthest minimum isolating cut can be absorbed into it without losing an
optimum; after that, a boundary edge is either cut or pulled into the group,
and the latter strictly raises the group's isolating-cut value.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

from .core import INF, Edge, InfeasibleError, Weight
from .cuts import component_labels, max_flow


def _ceil_half(x):
    return x if x == INF else math.ceil(x / 2)


def multiway_cut(
    vertices: frozenset,
    weights: Mapping[Edge, Weight],
    groups: list[frozenset],
    cutoff: Weight = INF,
) -> Optional[tuple[Weight, frozenset]]:
    """Minimum edge set separating all groups, or None if none beats cutoff."""
    weights = dict(weights)
    for i, a in enumerate(groups):
        for b in groups[i + 1 :]:
            if a & b:
                raise ValueError("groups overlap")
    best: list = [cutoff, None]

    def solve(groups, removed: frozenset, cost):
        live = {e: w for e, w in weights.items() if e not in removed}
        label = component_labels(vertices, live)
        # groups alone in their component are done
        owner: dict = {}
        for i, g in enumerate(groups):
            for c in {label[v] for v in g}:
                owner.setdefault(c, []).append(i)
        active = sorted({i for ids in owner.values() if len(ids) > 1 for i in ids})
        if not active:
            if cost < best[0]:
                best[0], best[1] = cost, removed
            return
        groups = [groups[i] for i in active]
        if len(groups) == 2:
            value, side, _ = max_flow(vertices, live, groups[0], groups[1])
            if value == INF or cost + value >= best[0]:
                return
            cut = frozenset(e for e in live if (e[0] in side) != (e[1] in side))
            best[0], best[1] = cost + value, removed | cut
            return
        groups = list(groups)
        for i in range(len(groups)):
            others = frozenset().union(*(g for j, g in enumerate(groups) if j != i))
            value, _, far = max_flow(vertices, live, groups[i], others)
            if value == INF:
                return
            groups[i] = far
        # pushed groups may now touch: recompute values against the new sets
        lams = []
        sides = []
        for i in range(len(groups)):
            others = frozenset().union(*(g for j, g in enumerate(groups) if j != i))
            value, _, far = max_flow(vertices, live, groups[i], others)
            if value == INF:
                return
            lams.append(value)
            sides.append(far)
        lb = max(max(lams), _ceil_half(sum(lams)))
        if cost + lb >= best[0]:
            return
        # heuristic incumbent: all isolating cuts but the most expensive
        order = sorted(range(len(groups)), key=lambda i: (lams[i], i))
        heur = set()
        for i in order[:-1]:
            s = sides[i]
            heur |= {e for e in live if (e[0] in s) != (e[1] in s)}
        hw = cost + sum(live[e] for e in heur)
        if hw < best[0]:
            best[0], best[1] = hw, removed | frozenset(heur)
            if cost + lb >= best[0]:
                return
        if max(lams) == 0:
            return
        # branch on the lowest boundary edge of the first group with one
        i = next(k for k in range(len(groups)) if lams[k] > 0)
        s = sides[i]
        bnd = sorted(e for e in live if (e[0] in s) != (e[1] in s))
        e = bnd[0]
        v = e[1] if e[0] in s else e[0]
        w = live[e]
        solve(groups, removed | {e}, cost + w)
        if any(v in g for j, g in enumerate(groups) if j != i):
            return
        grown = list(groups)
        grown[i] = s | {v}
        solve(grown, removed, cost)

    solve(list(groups), frozenset(), 0)
    if best[1] is None:
        return None
    return best[0], best[1]


def multiway_cut_exact(vertices, weights, groups) -> tuple[Weight, frozenset]:
    res = multiway_cut(frozenset(vertices), weights, list(groups))
    if res is None:
        raise InfeasibleError("no finite multiway cut")
    return res
