"""Exact unweighted Multicut on graphs that become planar after deleting few edges.

The driver follows a search tree over instances. A connected instance gets
a minimum planarizing set, is branched over states, and yields a candidate
multicut plus smaller extended subinstances; disconnected instances split
into components. Every candidate is re-verified before it competes.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import (
    INF,
    Instance,
    InstanceError,
    InternalConsistencyError,
    KPlanarContext,
    Solution,
)
from .cuts import max_flow, verify_multicut
from .dual import planar_multicut_exact
from .planar import PlanarizationError, find_planarizing_edges
from .states import (
    Kind,
    State,
    branch_incomplete,
    enumerate_initial_states,
    evaluate,
    handle_thin_complete,
    is_relevant,
    lam0,
    make_relevant,
    solve_no_thin_complete,
    trace_line,
    uncovered_thin_neighbor,
)


@dataclass
class KPlanarConfig:
    pi_max: int = 4
    check_laws: bool = True
    node_guard: int = 500_000
    prune: bool = False
    trace: Optional[Callable[[str], None]] = None


@dataclass
class SearchStats:
    instances: int = 0
    states: int = 0
    relevant_moves: int = 0
    branch_moves: int = 0
    candidates: int = 0
    subinstances: int = 0
    pruned_bound: int = 0
    pruned_invalid: int = 0
    pruned_measure: int = 0


@dataclass
class BranchResult:
    candidate: Optional[Solution]
    subs: list = field(default_factory=list)


def _pi_min(instance: Instance, pi_max: int) -> int:
    found = find_planarizing_edges(instance.graph, pi_max)
    if found is None:
        raise PlanarizationError(f"graph needs more than {pi_max} edge deletions to become planar")
    return len(found)


def measure(instance: Instance, pi_max: int) -> int:
    """pi(G) + |V(H)|, the quantity that shrinks along the search tree."""
    return _pi_min(instance, pi_max) + instance.t


def _state_lower_bound(ctx: KPlanarContext, P: State) -> int:
    covered = P.covered
    total = sum(lam0(ctx, Y, covered - Y) for Y in P.classes)
    return math.ceil(total / 2)


def _splits_demand(ctx: KPlanarContext, P: State) -> bool:
    owner = {v: i for i, Y in enumerate(P.classes) for v in Y}
    return any(owner[a] == owner[b] for a, b in ctx.base.demands)


def branch_instance(
    ctx: KPlanarContext,
    cutoff=INF,
    config: Optional[KPlanarConfig] = None,
    stats: Optional[SearchStats] = None,
    emit: Optional[Callable[[str], None]] = None,
) -> BranchResult:
    """Explore states of a connected instance.

    Returns the best candidate below the cutoff found at complete states
    without thin classes, and the extended subinstances produced at complete
    states with a thin class, deduplicated.
    """
    config = config or KPlanarConfig()
    stats = stats or SearchStats()
    base = ctx.base
    if not base.graph.is_connected():
        raise InstanceError("branching needs a connected instance")
    if not base.demands:
        return BranchResult(Solution(frozenset(), 0), [])
    own_measure = len(ctx.e_pi) + base.t
    best: Optional[Solution] = None
    bound = cutoff
    subs: dict = {}
    seen: set = set()
    stack = [P for P in reversed(enumerate_initial_states(ctx)) if not _splits_demand(ctx, P)]
    while stack:
        P = stack.pop()
        if P in seen:
            continue
        seen.add(P)
        stats.states += 1
        if stats.states > config.node_guard:
            raise InternalConsistencyError(f"search guard exceeded: {config.node_guard} states")
        info = evaluate(ctx, P)
        if config.prune and _state_lower_bound(ctx, P) >= bound:
            stats.pruned_bound += 1
            continue
        if not is_relevant(ctx, P):
            stats.relevant_moves += 1
            Q = make_relevant(ctx, P, check=config.check_laws)
            if emit:
                emit(trace_line(info, "relevant"))
            stack.append(Q)
            continue
        if uncovered_thin_neighbor(ctx, P) is not None:
            stats.branch_moves += 1
            children = branch_incomplete(ctx, P, check=config.check_laws)
            if emit:
                emit(trace_line(info, "branch"))
            stack.extend(reversed(children))
            continue
        if Kind.THIN not in info.kinds:
            if emit:
                emit(trace_line(info, "nothin"))
            cand = solve_no_thin_complete(ctx, P, cutoff=bound)
            if cand is not None:
                if not verify_multicut(base, cand.edges):
                    raise InternalConsistencyError("candidate is not a multicut")
                stats.candidates += 1
                if cand.weight < bound:
                    best, bound = cand, cand.weight
            continue
        if emit:
            emit(trace_line(info, "thin"))
        try:
            ext = handle_thin_complete(ctx, P)
        except InternalConsistencyError:
            stats.pruned_invalid += 1
            continue
        key = (ext.S_prime, ext.sub.canonical_key())
        if key in subs:
            continue
        # valid states always shrink the measure; anything else is discarded
        if measure(ext.sub, len(ctx.e_pi)) >= own_measure:
            stats.pruned_measure += 1
            continue
        subs[key] = ext
    out = sorted(subs.values(), key=lambda x: (len(x.S_prime), sorted(x.S_prime)))
    for ext in out:
        if measure(ext.sub, len(ctx.e_pi)) >= own_measure:
            raise InternalConsistencyError("subinstance does not shrink the measure")
    stats.subinstances += len(out)
    return BranchResult(best, out)


class KPlanarSolver:
    """Search-tree driver with memoization of solved subinstances."""

    def __init__(self, config: Optional[KPlanarConfig] = None):
        self.config = config or KPlanarConfig()
        self.stats = SearchStats()
        self.memo: dict = {}

    def _emit(self, depth: int):
        tr = self.config.trace
        if tr is None:
            return None
        return lambda line: tr("  " * depth + line)

    def solve(self, instance: Instance) -> Solution:
        if not instance.is_unweighted:
            raise InstanceError("kplanar solver requires unit weights")
        sol = self._solve(instance, INF, 0)
        if sol is None or not verify_multicut(instance, sol.edges):
            raise InternalConsistencyError("solver produced no valid multicut")
        return sol

    @staticmethod
    def _lower_bound(inst: Instance) -> int:
        g = inst.graph
        caps = {e: 1 for e in g.edges}
        return max((max_flow(g.vertices, caps, {a}, {b})[0] for a, b in sorted(inst.demands)), default=0)

    def _solve(self, inst: Instance, cutoff, depth: int) -> Optional[Solution]:
        """Minimum multicut if its weight is below cutoff, else None."""
        if not inst.demands:
            return Solution(frozenset(), 0) if cutoff > 0 else None
        used = frozenset(v for d in inst.demands for v in d)
        if used != inst.terminals:
            inst = inst.replace(terminals=used)
        key = inst.canonical_key()
        hit = self.memo.get(key)
        if hit is not None:
            kind, val = hit
            if kind == "exact":
                return val if val.weight < cutoff else None
            if val >= cutoff:
                return None
        emit = self._emit(depth)
        self.stats.instances += 1
        comps = [c for c in inst.graph.components() if c & inst.terminals]
        if len(comps) > 1 or len(comps[0]) < inst.graph.n:
            result = self._solve_split(inst, comps, cutoff, depth)
        else:
            result = self._solve_connected(inst, cutoff, depth, emit)
        if result is not None:
            self.memo[key] = ("exact", result)
        else:
            self.memo[key] = ("lb", cutoff)
        return result

    def _solve_split(self, inst, comps, cutoff, depth) -> Optional[Solution]:
        emit = self._emit(depth)
        if emit:
            emit(f"split components={len(comps)}")
        parts = [inst.induced(c) for c in comps]
        lbs = [self._lower_bound(p) for p in parts]
        total, edges = 0, set()
        for i, p in enumerate(parts):
            rest = sum(lbs[i + 1 :])
            sol = self._solve(p, cutoff - total - rest, depth + 1)
            if sol is None:
                return None
            total += sol.weight
            edges |= sol.edges
        if total >= cutoff:
            return None
        return Solution.of(inst, edges)

    def _solve_connected(self, inst, cutoff, depth, emit) -> Optional[Solution]:
        e_pi = find_planarizing_edges(inst.graph, self.config.pi_max)
        if e_pi is None:
            raise PlanarizationError(
                f"graph needs more than {self.config.pi_max} edge deletions to become planar"
            )
        ctx = KPlanarContext(inst, e_pi)
        lb = self._lower_bound(inst)
        if lb >= cutoff:
            return None
        if emit:
            emit(f"instance n={inst.graph.n} m={inst.graph.m} t={inst.t} pi={len(e_pi)} lb={lb}")
        best = self._incumbent(ctx, cutoff) if self.config.prune else None
        bound = cutoff if best is None else best.weight
        if best is not None and best.weight == lb:
            return best
        res = branch_instance(ctx, bound, self.config, self.stats, emit)
        if res.candidate is not None and res.candidate.weight < bound:
            best, bound = res.candidate, res.candidate.weight
        for ext in res.subs:
            if self.config.prune and best is not None and best.weight == lb:
                break
            k = len(ext.S_prime)
            if k >= bound:
                continue
            if emit:
                emit(f"sub case={ext.case} cut={k}")
            sub = self._solve(ext.sub, bound - k, depth + 1)
            if sub is None:
                continue
            cand = ext.S_prime | sub.edges
            if not verify_multicut(inst, cand):
                continue
            w = inst.cost(cand)
            if w < bound:
                best, bound = Solution.of(inst, cand), w
        return best

    def _incumbent(self, ctx: KPlanarContext, cutoff) -> Optional[Solution]:
        """A multicut of G0 plus the fewest pi edges that complete it."""
        inst = ctx.base
        g0 = inst.without_edges(ctx.e_pi).replace(e_pi=frozenset())
        S0 = planar_multicut_exact(g0, assume_planar=True).edges
        for S_pi in sorted(_subsets(ctx.e_pi), key=lambda s: (len(s), s)):
            cand = S0 | frozenset(S_pi)
            if verify_multicut(inst, cand):
                sol = Solution.of(inst, cand)
                return sol if sol.weight < cutoff else None
        raise InternalConsistencyError("G0 multicut plus all pi edges is not a multicut")


def _subsets(items):
    items = sorted(items)
    return [tuple(x for i, x in enumerate(items) if m >> i & 1) for m in range(1 << len(items))]


def solve_kplanar(
    instance: Instance, pi_max: Optional[int] = None, config: Optional[KPlanarConfig] = None
) -> Solution:
    """Minimum multicut; pi_max, when given, overrides the config's value."""
    config = config or KPlanarConfig()
    if pi_max is not None and pi_max != config.pi_max:
        config = dataclasses.replace(config, pi_max=pi_max)
    return KPlanarSolver(config).solve(instance)
