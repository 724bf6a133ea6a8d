"""Command line front end.

Build commands write a small ``<out>.meta.json`` sidecar with the
preprocessing time and counts; the benchmark commands read it back to
fill their prep column.  Benchmark output is CSV (stdout or -o), query
output is a short human-readable block.  Vertex ids on the command line
are 0-based, matching the library API; the .gr files themselves stay
1-based on disk.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import _backend
from .bench import (
    DEFAULT_POLICIES,
    backend_rows_to_csv,
    compare_backends,
    full_policy_grid,
    run_dijkstra_rank_bench,
    run_random_queries,
    verify_against_oracle,
)
from .ch import build_contraction_hierarchy
from .construction import build_edge_hierarchy
from .graph import DimacsFormatError, load_gr, save_gr, turn_expand
from .hierarchy import EdgeHierarchy, StallPolicy
from .query import EHQuery
from .serialization import FormatError, load_any, load_ch, load_eh, save_ch, save_eh


def _backend_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--backend", default=None, choices=["auto", "pure", "compiled"],
        help="kernel implementation (default: auto, honors EHROUTE_BACKEND)",
    )
    return p


def _write_meta(out: Path, **fields) -> None:
    meta = Path(str(out) + ".meta.json")
    meta.write_text(json.dumps(fields, indent=2) + "\n")


def _read_prep_seconds(path: str) -> float | None:
    meta = Path(path + ".meta.json")
    if not meta.exists():
        return None
    try:
        return float(json.loads(meta.read_text()).get("prep_seconds"))
    except (ValueError, TypeError, json.JSONDecodeError):
        return None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build_eh(args) -> int:
    g = load_gr(args.graph)
    backend = _backend.resolve_backend(args.backend)
    t0 = time.perf_counter()
    h = build_edge_hierarchy(g, oracle=args.oracle, backend=backend,
                             workers=args.workers)
    prep = time.perf_counter() - t0
    save_eh(h, args.output)
    _write_meta(
        Path(args.output), prep_seconds=prep, vertices=h.vertex_count,
        edges=h.edge_count, shortcuts=h.shortcut_count,
        input_edges=g.edge_count, oracle=args.oracle, backend=backend,
        kind="eh", source=Path(args.graph).name,
    )
    if args.log_rounds:
        with open(args.log_rounds, "w") as fh:
            fh.write("round,selected,unranked_at_start\n")
            for rnd, selected, unranked in h.round_log:
                fh.write(f"{rnd},{selected},{unranked}\n")
    print(
        f"{args.output}: {h.vertex_count} vertices, {h.edge_count} edges"
        f" ({h.shortcut_count} shortcuts), built in {prep:.2f}s [{backend}]"
    )
    return 0


def cmd_build_ch(args) -> int:
    g = load_gr(args.graph)
    backend = _backend.resolve_backend(args.backend)
    t0 = time.perf_counter()
    h = build_contraction_hierarchy(g, backend=backend)
    prep = time.perf_counter() - t0
    save_ch(h, args.output)
    _write_meta(
        Path(args.output), prep_seconds=prep, vertices=h.vertex_count,
        edges=h.edge_count, shortcuts=h.shortcut_count,
        input_edges=g.edge_count, backend=backend, kind="ch",
        source=Path(args.graph).name,
    )
    print(
        f"{args.output}: {h.vertex_count} vertices, {h.edge_count} edges"
        f" ({h.shortcut_count} shortcuts), built in {prep:.2f}s [{backend}]"
    )
    return 0


def cmd_turn_expand(args) -> int:
    g = load_gr(args.graph)
    expanded, mapping = turn_expand(g, args.uturn_cost, args.turn_cost)
    save_gr(expanded, args.output)
    if args.mapping:
        with open(args.mapping, "w") as fh:
            fh.write("# expanded vertex ids for each input object, 0-based\n")
            fh.write("# edge <input edge id> <tail> <head> <expanded vertex>\n")
            for e in range(mapping.edge_count):
                fh.write(
                    f"edge {e} {g.tail[e]} {g.head[e]} {mapping.edge_copy[e]}\n"
                )
            for v in range(mapping.vertex_count):
                if mapping.sink_copy[v] >= 0:
                    fh.write(f"sink {v} {mapping.sink_copy[v]}\n")
    print(
        f"{args.output}: {expanded.vertex_count} vertices,"
        f" {expanded.edge_count} edges"
        f" (from {g.vertex_count} vertices, {g.edge_count} edges)"
    )
    return 0


def cmd_query(args) -> int:
    h = load_any(args.hierarchy)
    if not isinstance(h, EdgeHierarchy):
        print("query runs on edge hierarchies; this is a contraction"
              " hierarchy (use verify or bench-random)", file=sys.stderr)
        return 2
    try:
        policy = StallPolicy.parse(args.stall)
    except ValueError as exc:
        print(f"bad --stall value: {exc}", file=sys.stderr)
        return 2
    q = EHQuery(h, backend=args.backend)
    r = q.query(args.source, args.target, policy, with_path=args.unpack)
    if not r.reachable:
        print(f"{args.source} -> {args.target}: unreachable")
    else:
        print(f"{args.source} -> {args.target}: distance {r.distance}")
        print(f"meeting vertex {r.meeting_vertex}")
    st = r.stats
    print(
        f"settled {st.settled}  relaxed {st.relaxed}"
        f"  stall checks {st.stall_checks}"
        f"  time {st.elapsed_seconds * 1e6:.1f}us  [{policy}]"
    )
    if args.unpack and r.reachable:
        walk = q.unpack(r)
        print(f"path: {len(walk)} edges")
        for u, v, w in walk:
            print(f"  {u} -> {v}  w={w}")
    return 0


def _parse_policies(spec: str) -> list[StallPolicy]:
    if spec == "default":
        return list(DEFAULT_POLICIES)
    if spec == "grid":
        return full_policy_grid()
    return [StallPolicy.parse(p) for p in spec.split(",") if p]


def cmd_bench_random(args) -> int:
    h = load_any(args.hierarchy)
    graph = load_gr(args.graph) if args.graph else None
    if args.min_vertices and graph is None:
        print("--min-vertices needs --graph for ground-truth searches",
              file=sys.stderr)
        return 2
    ch = load_ch(args.ch) if args.ch else None
    try:
        policies = _parse_policies(args.policies)
    except ValueError as exc:
        print(f"bad --policies value: {exc}", file=sys.stderr)
        return 2
    report = run_random_queries(
        h, graph, args.n, args.seed, policies,
        ch=ch, min_vertices=args.min_vertices, backend=args.backend,
        workers=_backend.worker_count(args.workers),
        instance=args.instance or Path(args.hierarchy).stem,
        prep_seconds=_read_prep_seconds(args.hierarchy),
        ch_prep_seconds=_read_prep_seconds(args.ch) if args.ch else None,
    )
    _emit(report.to_csv(), args.output)
    return 0


def cmd_bench_rank(args) -> int:
    h = load_eh(args.hierarchy)
    g = load_gr(args.graph)
    try:
        policy = StallPolicy.parse(args.stall)
    except ValueError as exc:
        print(f"bad --stall value: {exc}", file=sys.stderr)
        return 2
    report = run_dijkstra_rank_bench(
        g, h, args.sources, args.seed, policy=policy, backend=args.backend,
    )
    _emit(report.to_csv(), args.output)
    if report.recheck_mismatches:
        print(f"{report.recheck_mismatches} oracle mismatches", file=sys.stderr)
        return 1
    return 0


def cmd_bench_backends(args) -> int:
    g = load_gr(args.graph)
    if args.backends:
        names = [b for b in args.backends.split(",") if b]
    else:
        names = _backend.available_backends()
    rows = compare_backends(g, args.n, args.seed, backends=names)
    _emit(backend_rows_to_csv(rows), args.output)
    counts = {f"{r.mean_settled:.3f}" for r in rows}
    if len(counts) > 1:
        print("settled counts differ between kernels", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    h = load_any(args.hierarchy)
    g = load_gr(args.graph)
    ch = load_ch(args.ch) if args.ch else None
    report = verify_against_oracle(
        h, g, args.n, args.seed, ch=ch, backend=args.backend,
    )
    print(report.summary())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    be = _backend_parent()
    top = argparse.ArgumentParser(
        prog="ehroute",
        description="Edge-ranked shortest path hierarchies: build, query,"
                    " benchmark.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-eh", parents=[be],
                       help="preprocess a .gr graph into an edge hierarchy")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--oracle", default="ch", choices=["ch", "dijkstra"],
                   help="distance oracle used during construction")
    p.add_argument("--log-rounds", metavar="CSV",
                   help="write per-round selection counts")
    p.add_argument("--workers", type=int, default=None,
                   help="construction worker threads (default EHROUTE_WORKERS)")
    p.set_defaults(func=cmd_build_eh)

    p = sub.add_parser("build-ch", parents=[be],
                       help="preprocess a .gr graph into a contraction hierarchy")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_ch)

    p = sub.add_parser("turn-expand",
                       help="rewrite a .gr graph so turn costs become edge weights")
    p.add_argument("graph")
    p.add_argument("--uturn-cost", type=int, required=True)
    p.add_argument("--turn-cost", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mapping", metavar="FILE",
                   help="write input-object to expanded-vertex id mapping")
    p.set_defaults(func=cmd_turn_expand)

    p = sub.add_parser("query", parents=[be],
                       help="answer one s-t query from a built hierarchy")
    p.add_argument("hierarchy")
    p.add_argument("-s", "--source", type=int, required=True)
    p.add_argument("-t", "--target", type=int, required=True)
    p.add_argument("--stall", default="none",
                   help="none | on-demand | in-advance | partial:<fraction>")
    p.add_argument("--unpack", action="store_true",
                   help="expand the packed path to input edges")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench-random", parents=[be],
                       help="replay seeded random queries over a policy grid")
    p.add_argument("hierarchy")
    p.add_argument("--graph", help=".gr input, needed for --min-vertices")
    p.add_argument("-n", type=int, default=1000, help="query count")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--policies", default="default",
                   help="'default', 'grid' (partial 0%%..100%%),"
                        " or a comma list like none,partial:0.3")
    p.add_argument("--ch", metavar="CH.BIN",
                   help="also run a contraction hierarchy on the same pairs")
    p.add_argument("--min-vertices", action="store_true",
                   help="count settled vertices at their true distance"
                        " (two extra plain searches per query)")
    p.add_argument("--workers", type=int, default=None,
                   help="query worker threads (default EHROUTE_WORKERS)")
    p.add_argument("--instance", help="instance label for the CSV")
    p.add_argument("-o", "--output", metavar="CSV")
    p.set_defaults(func=cmd_bench_random)

    p = sub.add_parser("bench-rank", parents=[be],
                       help="per-rank query statistics from seeded sources")
    p.add_argument("hierarchy")
    p.add_argument("graph")
    p.add_argument("--sources", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--stall", default="none")
    p.add_argument("-o", "--output", metavar="CSV")
    p.set_defaults(func=cmd_bench_rank)

    p = sub.add_parser("bench-backends",
                       help="build and query the same graph on every kernel"
                            " implementation and compare")
    p.add_argument("graph")
    p.add_argument("-n", type=int, default=200, help="query count")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--backends", metavar="LIST",
                   help="comma list (default: all available)")
    p.add_argument("-o", "--output", metavar="CSV")
    p.set_defaults(func=cmd_bench_backends)

    p = sub.add_parser("verify", parents=[be],
                       help="compare hierarchy answers to plain searches")
    p.add_argument("hierarchy")
    p.add_argument("graph")
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--ch", metavar="CH.BIN")
    p.set_defaults(func=cmd_verify)

    return top


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DimacsFormatError, FormatError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
