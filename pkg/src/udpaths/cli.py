"""Command-line driver.

Exit codes: 0 success, 1 usage or invalid parameters, 2 verification
failure, 3 refusal because the predicted count exceeds the budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import io as uio
from .constructions import (
    BipartiteR3Config,
    ConstructionError,
    PlanarScene,
    SphereConfig,
    bipartite_r3_construction,
    cycle_construction,
    enhanced_path_construction,
    grid_incidence_scene,
    path_construction,
    quadratic_c4_config,
    rich_q_set,
)
from .counting import (
    ENGINES,
    CountReport,
    count_antipodal_free_paths,
    count_cycles,
    count_paths,
    count_pattern_paths,
    count_prescribed_copies,
    count_subgraph_copies,
)
from .exponents import (
    COUNT_BUDGET,
    COUNT_MODES,
    CONSTRUCTIONS,
    BudgetExceeded,
    bound_table,
    estimate_count,
    fit_summary,
    run_scaling,
)
from .graph import (
    K4,
    K33,
    PRISM,
    RegularGraphSpec,
    UnitDistanceGraph,
    build_incidence_graph,
    build_prescribed_graph,
    build_sphere_graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
)
from .lp import verify_theorem3

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3
JOBS_ENV = "UDPATHS_JOBS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def named_graph(name: str) -> RegularGraphSpec:
    """``K4``, ``K33``, ``prism``, ``C<k>``, ``K<k>`` or ``K<a>,<b>``."""
    fixed = {"k4": K4, "k33": K33, "k3,3": K33, "prism": PRISM}
    key = name.lower()
    if key in fixed:
        return fixed[key]
    try:
        if key.startswith("c"):
            return cycle_graph(int(key[1:]))
        if key.startswith("k") and "," in key:
            a, b = key[1:].split(",")
            return complete_bipartite(int(a), int(b))
        if key.startswith("k"):
            return complete_graph(int(key[1:]))
    except ValueError:
        pass
    raise UsageError(f"unknown pattern graph {name!r}")


# ---------------------------------------------------------------------------
# construct


def _build(args) -> SphereConfig | PlanarScene | BipartiteR3Config:
    kind = args.kind

    def need(*names):
        for name in names:
            if getattr(args, name) is None:
                raise UsageError(f"--kind {kind} needs --{name}")

    if kind == "sphere-path":
        need("k", "n")
        return CONSTRUCTIONS["sphere-path"](args.k, args.n)
    if kind == "sphere-cycle":
        need("k", "n")
        return cycle_construction(args.k, args.n)
    if kind == "enhanced-path":
        need("k", "n")
        return enhanced_path_construction(args.k, args.n)
    if kind == "quadratic-c4":
        need("n")
        return quadratic_c4_config(args.n)
    if kind == "rich":
        need("n")
        return rich_q_set(args.n)
    if kind == "grid":
        need("N")
        return grid_incidence_scene(args.N)
    if kind == "r3-bipartite":
        need("k", "n")
        return bipartite_r3_construction(args.k, args.n)
    raise UsageError(f"unknown kind {kind!r}")


def cmd_construct(args) -> int:
    cfg = _build(args)
    if isinstance(cfg, (SphereConfig, BipartiteR3Config)):
        cfg.validate()
    _emit(uio.dumps(uio.config_to_dict(cfg)), args.out)
    if args.edges:
        uio.save_graph(_graph_for(cfg, args), args.edges, args.sidecar)
    return EXIT_OK


# ---------------------------------------------------------------------------
# count


def _graph_for(cfg, args) -> UnitDistanceGraph:
    if isinstance(cfg, SphereConfig):
        return build_sphere_graph(cfg)
    if isinstance(cfg, PlanarScene):
        return build_incidence_graph(cfg)
    G = named_graph(args.graph) if getattr(args, "graph", None) else complete_bipartite(
        len(cfg.line_points), len(cfg.line_points))
    return build_prescribed_graph(cfg, G)


def _estimate(cfg, g: UnitDistanceGraph, k: int, what: str = "paths") -> int:
    """Pattern count for generated constructions, the product of part sizes
    for prescribed copies, else ``n * maxdeg^(k-1)``."""
    if isinstance(cfg, SphereConfig) and cfg.pattern is not None and cfg.k == k:
        return estimate_count(cfg)
    if what == "prescribed" and g.part_assignment is not None:
        out = 1
        for part in g.parts():
            out *= len(part)
        return out
    maxdeg = max((g.degree(v) for v in range(g.vertex_count)), default=0)
    return g.vertex_count * maxdeg ** max(k - 1, 0)


def _count_once(what: str, g: UnitDistanceGraph, cfg, args, engine: str) -> dict:
    k = args.k
    jobs = args.jobs
    if what == "paths":
        rep = count_paths(g, k, engine, jobs)
        af = count_antipodal_free_paths(g, k, engine, jobs) if g.antipode is not None else None
        cyc = count_cycles(g, k, engine, jobs) if k >= 3 else None
        rep = CountReport(k, rep.ordered_paths, rep.unordered_paths, engine, af, cyc)
        return json.loads(rep.to_json())
    if what == "antipodal-free":
        return {"k": k, "engine": engine, "antipodal_free_unordered": str(count_antipodal_free_paths(g, k, engine, jobs))}
    if what == "cycles":
        return {"k": k, "engine": engine, "cycles_dihedral": str(count_cycles(g, k, engine, jobs))}
    if what == "pattern":
        if not isinstance(cfg, SphereConfig):
            raise UsageError("pattern counts need a sphere construction")
        return {"k": cfg.k, "pattern_paths": str(count_pattern_paths(cfg, graph=g, distinct=not args.walks)),
                "distinct": not args.walks}
    if what == "copies":
        G = named_graph(args.graph or f"C{k}")
        return {"graph": args.graph or f"C{k}", "induced": args.induced,
                "copies": str(count_subgraph_copies(g, G, args.induced))}
    if what == "prescribed":
        G = named_graph(args.graph) if args.graph else complete_bipartite(k // 2, k // 2)
        return {"graph": args.graph or f"K{k // 2},{k // 2}", "copies": str(count_prescribed_copies(g, G))}
    raise UsageError(f"unknown count target {what!r}")


def cmd_count(args) -> int:
    cfg = None
    if args.input:
        cfg = uio.load_config(args.input)
        g = _graph_for(cfg, args)
    elif args.edges:
        g = uio.load_graph(args.edges, args.sidecar)
    else:
        raise UsageError("count needs --input or --edges")
    if args.k is None:
        if isinstance(cfg, SphereConfig) and cfg.k:
            args.k = cfg.k
        elif isinstance(cfg, BipartiteR3Config):
            args.k = 2 * len(cfg.line_points)
        else:
            raise UsageError("count needs --k")
    est = _estimate(cfg, g, args.k, args.what)
    if est > args.budget and not args.force:
        raise BudgetExceeded(g.vertex_count, est, args.budget)
    engines = list(ENGINES) if args.engine == "both" else [args.engine]
    results, timing = [], {}
    for engine in engines:
        t0 = time.perf_counter()
        results.append(_count_once(args.what, g, cfg, args, engine))
        timing[engine] = round(time.perf_counter() - t0, 6)
    strip = lambda r: {k: v for k, v in r.items() if k != "engine"}
    if len(results) == 2 and strip(results[0]) != strip(results[1]):
        sys.stderr.write("engines disagree\n")
        _emit(uio.dumps({"reports": results, "timing": timing}), args.out)
        return EXIT_VERIFY
    out = {"reports": results, "estimate": str(est), "timing": timing}
    _emit(uio.dumps(out), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit / lp-verify / bounds


def cmd_fit(args) -> int:
    grid = [int(x) for x in args.grid.split(",")]
    if len(grid) < 3:
        raise UsageError("--grid needs at least 3 values")
    run = run_scaling(args.construction, args.k, grid, args.mode, args.engine, args.jobs, args.budget)
    if args.csv:
        Path(args.csv).write_text(run.to_csv())
    else:
        sys.stdout.write(run.to_csv())
    summary = fit_summary(run)
    summary["series"] = [[n, str(c)] for n, c in run.series]
    _emit(uio.dumps(summary), args.json)
    return EXIT_OK


def cmd_lp_verify(args) -> int:
    if args.graph_file:
        G = uio.load_pattern_graph(args.graph_file)
    elif args.named:
        G = named_graph(args.named)
    else:
        raise UsageError("lp-verify needs an edge-list file or --named")
    if not G.is_regular(3):
        raise UsageError("pattern graph must be 3-regular")
    report = verify_theorem3(G)
    _emit(report.to_json() + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_bounds(args) -> int:
    _emit(bound_table(args.max_k).to_json() + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    default_jobs = int(os.environ.get(JOBS_ENV, "1"))
    p = _Parser(prog="udpaths", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="write a configuration as JSON")
    c.add_argument("--kind", required=True,
                   choices=["sphere-path", "sphere-cycle", "enhanced-path", "quadratic-c4",
                            "rich", "grid", "r3-bipartite"])
    c.add_argument("--k", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--N", type=int)
    c.add_argument("--graph", help="pattern graph for r3-bipartite edge export")
    c.add_argument("--out")
    c.add_argument("--edges", help="also write the graph as an edge list")
    c.add_argument("--sidecar", help="JSON sidecar path for --edges")
    c.set_defaults(func=cmd_construct)

    n = sub.add_parser("count", help="count paths, cycles, patterns or copies")
    n.add_argument("--input", help="configuration JSON")
    n.add_argument("--edges", help="edge-list file")
    n.add_argument("--sidecar", help="JSON sidecar for --edges")
    n.add_argument("--what", default="paths",
                   choices=["paths", "antipodal-free", "cycles", "pattern", "copies", "prescribed"])
    n.add_argument("--k", type=int)
    n.add_argument("--engine", default="optimized", choices=[*ENGINES, "both"])
    n.add_argument("--graph", help="pattern graph name for copies/prescribed (K4, K33, prism, C4, ...)")
    n.add_argument("--induced", action="store_true")
    n.add_argument("--walks", action="store_true", help="pattern walks instead of distinct paths")
    n.add_argument("--jobs", type=int, default=default_jobs)
    n.add_argument("--budget", type=int, default=COUNT_BUDGET)
    n.add_argument("--force", action="store_true", help="ignore the count budget")
    n.add_argument("--out")
    n.set_defaults(func=cmd_count)

    f = sub.add_parser("fit", help="scaling run and log-log fit")
    f.add_argument("--construction", required=True, choices=sorted(CONSTRUCTIONS))
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--grid", required=True, help="comma-separated n values")
    f.add_argument("--mode", default="paths", choices=COUNT_MODES)
    f.add_argument("--engine", default="optimized", choices=ENGINES)
    f.add_argument("--jobs", type=int, default=default_jobs)
    f.add_argument("--budget", type=int, default=COUNT_BUDGET)
    f.add_argument("--csv")
    f.add_argument("--json")
    f.set_defaults(func=cmd_fit)

    l = sub.add_parser("lp-verify", help="sweep the exponent LP over a 3-regular graph")
    l.add_argument("graph_file", nargs="?", help="edge-list file")
    l.add_argument("--named", help="K4, K33 or prism")
    l.add_argument("--out")
    l.set_defaults(func=cmd_lp_verify)

    b = sub.add_parser("bounds", help="print the exponent table")
    b.add_argument("--max-k", type=int, default=15)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_BUDGET
    except (UsageError, ConstructionError, ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
