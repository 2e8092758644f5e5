"""Command-line entry point: solve, gen, verify, bench and dual-report."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional

from .core import (
    INF,
    InfeasibleError,
    Instance,
    InstanceError,
    InternalConsistencyError,
    Solution,
    extended_biclique_distance,
    fmt_weight,
    parse_instance,
    parse_solution,
    serialize_instance,
)
from .crossing import solve_crossing, with_drawing, witness_report
from .cuts import OracleLimitError, oracle_min_multicut, verify_multicut
from .dual import planar_multicut_exact
from .generate import GenConfig, generate
from .kplanar import KPlanarConfig, solve_kplanar
from .planar import Drawing, is_planar, planarization_number

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


def _read(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _trace_sink():
    return lambda line: print(line, file=sys.stderr)


def run_solver(
    kind: str,
    inst: Instance,
    *,
    pi_max: int = 4,
    oracle_max_edges: int = 24,
    draw_tiny: bool = False,
    trace=None,
) -> Solution:
    """Run one solver and re-verify its answer."""
    if kind == "kplanar":
        sol = solve_kplanar(inst, pi_max, KPlanarConfig(pi_max=pi_max, trace=trace))
    elif kind == "crossing":
        inst = with_drawing(inst, draw_tiny)
        sol = solve_crossing(inst)
    elif kind == "planar":
        sol = planar_multicut_exact(inst)
    elif kind == "oracle":
        sol = oracle_min_multicut(inst, max_edges=oracle_max_edges)
    else:
        raise InstanceError(f"unknown solver {kind!r}")
    if not verify_multicut(inst, sol.edges) or inst.cost(sol.edges) != sol.weight:
        raise InternalConsistencyError("solver output failed verification")
    return sol


def cmd_solve(args) -> int:
    inst = _read(args.instance)
    sol = run_solver(
        args.solver,
        inst,
        pi_max=args.pi_max,
        oracle_max_edges=args.oracle_max_edges,
        draw_tiny=args.draw_tiny,
        trace=_trace_sink() if args.trace else None,
    )
    _write(sol.format(), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = GenConfig(
        n=args.n,
        density=args.density,
        t=args.t,
        pi=args.pi,
        crossings=args.crossings,
        max_weight=args.max_weight,
        inf_rate=args.inf_rate,
        max_edges=args.max_edges,
    )
    _write(serialize_instance(generate(args.seed, cfg)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _read(args.instance)
    try:
        weight, cut = parse_solution(Path(args.solution).read_text())
    except OSError as exc:
        raise InstanceError(f"cannot read {args.solution}: {exc.strerror}") from None
    unknown = cut - inst.edge_set
    if unknown:
        print(f"error: cut edge {min(unknown)} is not in the graph", file=sys.stderr)
        return EXIT_INPUT
    if not verify_multicut(inst, cut):
        print("error: solution is not a multicut", file=sys.stderr)
        return EXIT_INPUT
    if inst.cost(cut) != weight:
        print(
            f"error: header weight {fmt_weight(weight)} != cut weight {fmt_weight(inst.cost(cut))}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    print(f"ok weight={fmt_weight(weight)}")
    return EXIT_OK


def _pick_solver(inst: Instance) -> str:
    if inst.crossings:
        return "crossing"
    if inst.is_unweighted:
        return "kplanar"
    if is_planar(inst.graph):
        return "planar"
    return "crossing"


def bench_row(path: Path, args) -> str:
    """One key=value row; failures become part of the row."""
    fields = [f"file={path.name}"]
    try:
        inst = parse_instance(path.read_text())
    except InstanceError as exc:
        return " ".join(fields + [f"error=input:{exc}".replace(" ", "_")])
    kind = _pick_solver(inst)
    fields += [f"n={inst.graph.n}", f"m={inst.graph.m}", f"t={inst.t}"]
    if kind == "crossing" and inst.crossings:
        fields.append(f"cr={Drawing.of(inst).cr_bar}")
    else:
        try:
            fields.append(f"pi={planarization_number(inst.graph, args.pi_max)}")
        except InstanceError:
            fields.append("pi=>" + str(args.pi_max))
    fields += [f"mu={extended_biclique_distance(inst.demand_graph).mu}", f"solver={kind}"]
    start = time.perf_counter()
    try:
        sol = run_solver(kind, inst, pi_max=args.pi_max, draw_tiny=args.draw_tiny)
        weight = sol.weight
        fields.append(f"weight={fmt_weight(weight)}")
    except InfeasibleError:
        weight = None
        fields.append("weight=infeasible")
    except (InstanceError, InternalConsistencyError) as exc:
        return " ".join(fields + ["error=" + type(exc).__name__])
    elapsed = time.perf_counter() - start
    finite = sum(1 for w in inst.weight.values() if w != INF)
    if finite > args.oracle_max_edges:
        fields += ["oracle=skipped", "agree=-"]
    else:
        try:
            ow = oracle_min_multicut(inst, max_edges=args.oracle_max_edges).weight
        except InfeasibleError:
            ow = None
        except OracleLimitError:
            ow = "skip"
        if ow == "skip":
            fields += ["oracle=skipped", "agree=-"]
        else:
            fields.append("oracle=" + ("infeasible" if ow is None else fmt_weight(ow)))
            fields.append("agree=" + ("yes" if ow == weight else "no"))
    tw = "-"
    if inst.crossings and weight is not None and finite <= min(args.oracle_max_edges, 20):
        try:
            r = witness_report(inst)
            tw = "-" if r.tw is None else str(r.tw)
        except (InstanceError, InfeasibleError):
            pass
    fields.append(f"tw={tw}")
    if args.timing:
        fields.append(f"time={elapsed:.3f}")
    return " ".join(fields)


def _corpus(paths: list[str]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files += sorted(p.glob("*.mc"))
        elif p.exists():
            files.append(p)
        else:
            raise InstanceError(f"no such file or directory: {p}")
    return sorted(files, key=lambda f: (f.name, str(f)))


def cmd_bench(args) -> int:
    rows = [bench_row(f, args) for f in _corpus(args.corpus)]
    compared = [r for r in rows if " agree=yes" in r or " agree=no" in r]
    agreed = sum(" agree=yes" in r for r in compared)
    rate = f"{100 * agreed / len(compared):.1f}%" if compared else "-"
    summary = f"summary instances={len(rows)} compared={len(compared)} agreed={agreed} rate={rate}"
    _write("\n".join(rows + [summary]) + "\n", args.out)
    return EXIT_OK


def cmd_dual_report(args) -> int:
    lines = []
    for f in _corpus(args.instances):
        inst = with_drawing(parse_instance(f.read_text()), args.draw_tiny)
        if not inst.crossings:
            lines.append(f"file={f.name} error=no_crossings")
            continue
        lines.append(f"file={f.name} " + witness_report(inst, max_edges=args.oracle_max_edges).format())
    _write("\n".join(lines) + ("\n" if lines else ""), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nearplanar", description="Exact Multicut on near-planar graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write output to this file instead of stdout")
        sp.add_argument("--pi-max", type=int, default=4, help="largest planarizing set searched")
        sp.add_argument("--oracle-max-edges", type=int, default=20, help="oracle enumeration bound")
        sp.add_argument("--draw-tiny", action="store_true", help="compute a drawing for small graphs")

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("solver", choices=["kplanar", "crossing", "planar", "oracle"])
    s.add_argument("instance")
    s.add_argument("--trace", action="store_true", help="print the search tree to stderr")
    common(s)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--t", type=int, default=3)
    g.add_argument("--pi", type=int, default=0)
    g.add_argument("--crossings", type=int, default=0)
    g.add_argument("--max-weight", type=int, default=1)
    g.add_argument("--inf-rate", type=float, default=0.0)
    g.add_argument("--max-edges", type=int, default=None)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="solve and cross-check a corpus")
    b.add_argument("corpus", nargs="*", default=[])
    b.add_argument("--timing", action="store_true", help="add wall-clock time to rows")
    common(b)
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("dual-report", help="structural report for crossing instances")
    d.add_argument("instances", nargs="+")
    common(d)
    d.set_defaults(func=cmd_dual_report)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
