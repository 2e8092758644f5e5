"""States for the near-planar branching: alpha, kinds, kappa, tau and moves.

A state is a tuple of disjoint vertex classes covering W and T, each class
meeting W or T. Classes are kept sorted by their smallest vertex, which
fixes every choice the moves make.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import (
    INF,
    Edge,
    Instance,
    InternalConsistencyError,
    KPlanarContext,
    Solution,
    edge,
)
from .cuts import component_labels, max_flow, relevant_set, verify_multicut
from .dual import planar_multicut_exact


class Kind(enum.Enum):
    FAT = "F"
    FAT_NEIGHBORING = "N"
    THIN = "T"


class StateError(ValueError):
    """A move was applied to a state outside its precondition."""


@dataclass(frozen=True)
class State:
    classes: tuple

    @classmethod
    def of(cls, classes: Iterable[Iterable[int]]) -> "State":
        cs = [frozenset(c) for c in classes]
        if any(not c for c in cs):
            raise StateError("empty class")
        if sum(len(c) for c in cs) != len(frozenset().union(*cs)):
            raise StateError("classes overlap")
        return cls(tuple(sorted(cs, key=min)))

    @property
    def covered(self) -> frozenset:
        return frozenset().union(*self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def replace(self, old: frozenset, new: frozenset) -> "State":
        return State.of(new if c == old else c for c in self.classes)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, sorted(c))) + "}" for c in self.classes) + "}"


@dataclass(frozen=True)
class StateInfo:
    alphas: tuple
    kinds: tuple
    kappa: int
    tau: int

    def counts(self) -> str:
        return "F{}/N{}/T{}".format(*(sum(k is x for k in self.kinds) for x in Kind))


@dataclass(frozen=True)
class ExtendedSubinstance:
    S_prime: frozenset
    sub: Instance
    case: int

    def __post_init__(self):
        if self.S_prime & self.sub.edge_set:
            raise InternalConsistencyError("subinstance keeps an edge of S'")


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def lam0(ctx: KPlanarContext, Y1: Iterable[int], Y2: Iterable[int]) -> int:
    """Cardinality cut between Y1 and Y2 in G0, memoized on the context."""
    key = ("lam", frozenset(Y1), frozenset(Y2))
    hit = ctx.cache.get(key)
    if hit is None:
        G0 = ctx.G0
        hit = max_flow(G0.vertices, {e: 1 for e in G0.edges}, key[1], key[2])[0]
        ctx.cache[key] = hit
    return hit


def alpha(ctx: KPlanarContext, P: State, Y: frozenset) -> int:
    if Y not in P.classes:
        raise StateError("class not in state")
    rest = P.covered - Y
    WT = ctx.WT
    return lam0(ctx, Y, rest) - lam0(ctx, Y & WT, WT - Y)


def classify(ctx: KPlanarContext, P: State, alphas: Optional[tuple] = None) -> tuple:
    if alphas is None:
        alphas = tuple(alpha(ctx, P, Y) for Y in P.classes)
    fat = [a >= ctx.fat_threshold for a in alphas]
    fat_vertices = frozenset().union(*(Y for Y, f in zip(P.classes, fat) if f))
    adj = ctx.G0.adj
    kinds = []
    for Y, f in zip(P.classes, fat):
        if f:
            kinds.append(Kind.FAT)
        elif any(u in fat_vertices for v in Y for u in adj[v]):
            kinds.append(Kind.FAT_NEIGHBORING)
        else:
            kinds.append(Kind.THIN)
    return tuple(kinds)


def _kappa_of(ctx: KPlanarContext, alphas, kinds) -> int:
    th = ctx.fat_threshold
    total = 0
    for a, k in zip(alphas, kinds):
        if k is Kind.FAT:
            total += 2 * th
        elif k is Kind.FAT_NEIGHBORING:
            total += th + a
        else:
            total += a
    return total


def kappa(ctx: KPlanarContext, P: State) -> int:
    return evaluate(ctx, P).kappa


def tau(ctx: KPlanarContext, P: State) -> int:
    G0 = ctx.G0
    return sum(len(G0.induced(Y).components()) for Y in P.classes)


def evaluate(ctx: KPlanarContext, P: State) -> StateInfo:
    key = ("info", P)
    hit = ctx.cache.get(key)
    if hit is None:
        alphas = tuple(alpha(ctx, P, Y) for Y in P.classes)
        kinds = classify(ctx, P, alphas)
        hit = StateInfo(alphas, kinds, _kappa_of(ctx, alphas, kinds), tau(ctx, P))
        ctx.cache[key] = hit
    return hit


def kappa_bound(ctx: KPlanarContext, P: State) -> int:
    return len(P) * 2 * ctx.fat_threshold


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def is_state(ctx: KPlanarContext, P: State) -> bool:
    WT = ctx.WT
    return WT <= P.covered and all(Y & WT for Y in P.classes)


def extends(P1: State, P2: State) -> bool:
    """P2 extends P1: same size, each class inside its own class of P2."""
    if len(P1) != len(P2):
        return False
    where = {v: i for i, Y in enumerate(P2.classes) for v in Y}
    used = set()
    for Y in P1.classes:
        owners = {where.get(v) for v in Y}
        if len(owners) != 1 or None in owners:
            return False
        (i,) = owners
        if i in used:
            return False
        used.add(i)
    return True


def component_partition(ctx: KPlanarContext, S: Iterable[Edge]) -> State:
    """The partition of V(G) into components of G0 minus S0."""
    S0 = frozenset(edge(*e) for e in S) - ctx.e_pi
    label = component_labels(ctx.G0.vertices, ctx.G0.edges - S0)
    groups: dict = {}
    for v, r in label.items():
        groups.setdefault(r, set()).add(v)
    return State.of(groups.values())


def respects(ctx: KPlanarContext, S: Iterable[Edge], P: State) -> bool:
    return extends(P, component_partition(ctx, S))


def uncovered_thin_neighbor(ctx: KPlanarContext, P: State) -> Optional[int]:
    """Lowest uncovered vertex with a G0-neighbour in a thin class."""
    info = evaluate(ctx, P)
    thin = frozenset().union(
        *(Y for Y, k in zip(P.classes, info.kinds) if k is Kind.THIN)
    )
    covered = P.covered
    adj = ctx.G0.adj
    for v in sorted(ctx.G0.vertices - covered):
        if adj[v] & thin:
            return v
    return None


def is_complete(ctx: KPlanarContext, P: State) -> bool:
    return uncovered_thin_neighbor(ctx, P) is None


def is_relevant(ctx: KPlanarContext, P: State) -> bool:
    covered = P.covered
    return all(relevant_set(ctx.G0, Y, covered - Y) == Y for Y in P.classes)


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------


def set_partitions(items: list):
    """All set partitions in restricted-growth order."""
    n = len(items)
    if n == 0:
        yield []
        return

    def rec(i, code, top):
        if i == n:
            parts: list = [[] for _ in range(top + 1)]
            for x, c in zip(items, code):
                parts[c].append(x)
            yield parts
            return
        for c in range(top + 2):
            code.append(c)
            yield from rec(i + 1, code, max(top, c))
            code.pop()

    yield from rec(1, [0], 0)


def enumerate_initial_states(ctx: KPlanarContext) -> list[State]:
    states = [State.of(p) for p in set_partitions(sorted(ctx.WT))]
    bound = 2 * ctx.pi + ctx.t
    for P in states:
        if tau(ctx, P) > bound:
            raise InternalConsistencyError("initial state exceeds the tau bound")
    return states


def make_relevant(ctx: KPlanarContext, P: State, check: bool = True) -> State:
    """Replace each class, in canonical order, by its relevant set."""
    current = P
    for Y in P.classes:
        # Y may have been replaced already only by itself; classes are disjoint
        live = next(c for c in current.classes if Y <= c)
        new = relevant_set(ctx.G0, live, current.covered - live)
        if new != live:
            current = current.replace(live, new)
    if check:
        before, after = evaluate(ctx, P), evaluate(ctx, current)
        if len(current) != len(P):
            raise InternalConsistencyError("make_relevant changed the class count")
        if after.tau > before.tau:
            raise InternalConsistencyError("make_relevant increased tau")
        if after.kappa < before.kappa:
            raise InternalConsistencyError("make_relevant decreased kappa")
        if not is_state(ctx, current) or not is_relevant(ctx, current):
            raise InternalConsistencyError("make_relevant returned an irrelevant state")
    return current


def branch_incomplete(ctx: KPlanarContext, P: State, check: bool = True) -> list[State]:
    """One child per class: the class grown by the chosen uncovered vertex."""
    u0 = uncovered_thin_neighbor(ctx, P)
    if u0 is None:
        raise StateError("state is complete")
    if check and not is_relevant(ctx, P):
        raise StateError("state is not relevant")
    children = [P.replace(Y, Y | {u0}) for Y in P.classes]
    if check:
        info = evaluate(ctx, P)
        if len(children) > 2 * ctx.pi + ctx.t:
            raise InternalConsistencyError("too many branches")
        for c in children:
            ci = evaluate(ctx, c)
            if ci.kappa <= info.kappa:
                raise InternalConsistencyError("branching did not increase kappa")
            if ci.tau > info.tau + 1:
                raise InternalConsistencyError("branching increased tau by more than one")
            if ci.kappa > kappa_bound(ctx, c):
                raise InternalConsistencyError("kappa above its bound")
    return children


def handle_thin_complete(ctx: KPlanarContext, P: State) -> ExtendedSubinstance:
    """Cut around the first thin class and shrink the instance.

    Raises InternalConsistencyError when neither reduction applies, which
    certifies that the state is not valid.
    """
    info = evaluate(ctx, P)
    thin = [Y for Y, k in zip(P.classes, info.kinds) if k is Kind.THIN]
    if not thin:
        raise StateError("state has no thin class")
    if not is_complete(ctx, P):
        raise StateError("state is incomplete")
    Y0 = thin[0]
    S_prime = ctx.G0.boundary(Y0)
    base = ctx.base
    if any((u in Y0) != (v in Y0) for u, v in sorted(ctx.e_pi)):
        return ExtendedSubinstance(S_prime, base.without_edges(S_prime), 1)
    if Y0 & base.terminals:
        return ExtendedSubinstance(S_prime, base.induced(base.vertices - Y0), 2)
    raise InternalConsistencyError("thin class touches neither terminals nor a pi edge leaving it")


def reduced_planar_instance(ctx: KPlanarContext, P: State) -> Instance:
    """G0 with intra-class edges made infinite and demands between classes."""
    owner = {v: i for i, Y in enumerate(P.classes) for v in Y}
    edges = []
    for u, v in sorted(ctx.G0.edges):
        same = u in owner and owner.get(u) == owner.get(v)
        edges.append((u, v, INF if same else 1))
    reps = []
    for i, Y in enumerate(P.classes):
        for comp in ctx.G0.induced(Y).components():
            reps.append((min(comp), i))
    demands = [edge(a, b) for (a, i), (b, j) in itertools.combinations(reps, 2) if i != j]
    return Instance(
        vertices=ctx.G0.vertices,
        edges=tuple(edges),
        terminals=frozenset(r for r, _ in reps),
        demands=frozenset(demands),
    )


def solve_no_thin_complete(
    ctx: KPlanarContext, P: State, cutoff=INF
) -> Optional[Solution]:
    """Candidate multicut from a complete state without thin classes.

    Returns None when no candidate beats the cutoff or no choice of pi
    edges turns the planar solution into a multicut of the base instance.
    """
    planar = reduced_planar_instance(ctx, P)
    if planar.demands:
        sol = planar_multicut_exact(planar, cutoff=cutoff, assume_planar=True)
        if sol is None:
            return None
        S0 = sol.edges
    else:
        S0 = frozenset()
    base = ctx.base
    for k in range(len(ctx.e_pi) + 1):
        if len(S0) + k >= cutoff:
            return None
        for S_pi in itertools.combinations(sorted(ctx.e_pi), k):
            cand = S0 | frozenset(S_pi)
            if verify_multicut(base, cand):
                return Solution.of(base, cand)
    return None


def trace_line(info: StateInfo, action: str) -> str:
    return f"state κ={info.kappa} τ={info.tau} kinds={info.counts()} action={action}"


Tracer = Optional[Callable[[str], None]]
