"""Benchmark and verification harness.

Every run draws its source/target pairs once from a seeded generator and
replays the identical sequence for each configuration in the grid, so
policies are compared on the same queries.  Count statistics (settled,
relaxed, stall checks, min-vertices) are exact and reproducible from
(hierarchy, seed, n, policy); wall-clock means are informational.
Reports render as CSV with the seed in a comment header.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .ch import CHQuery
from .construction import build_edge_hierarchy
from .dijkstra import DijkstraEngine
from .graph import Graph, make_graph
from .hierarchy import ContractionHierarchy, EdgeHierarchy, StallPolicy, STALL_NONE
from .query import EHQuery, count_min_vertices

# 0%, 10%, ..., 100% prefix fractions plus the non-partial policies
def full_policy_grid() -> list[StallPolicy]:
    grid = [StallPolicy("none"), StallPolicy("on-demand"), StallPolicy("in-advance")]
    grid.extend(StallPolicy("partial", i / 10) for i in range(11))
    return grid


DEFAULT_POLICIES = (
    StallPolicy("none"),
    StallPolicy("on-demand"),
    StallPolicy("in-advance"),
    StallPolicy("partial", 0.5),
)


def sample_pairs(vertex_count: int, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform source/target pairs with replacement; one stream, so the
    sequence is a pure function of (vertex_count, n, seed)."""
    if vertex_count == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, vertex_count, size=(2, n), dtype=np.int64)
    return pairs[0], pairs[1]


@dataclass(frozen=True)
class BenchRow:
    instance: str
    algorithm: str  # "eh" or "ch"
    backend: str
    policy: str
    queries: int
    mean_time_us: float
    mean_settled: float
    mean_relaxed: float
    mean_stall_checks: float
    mean_min_vertices: float | None
    prep_seconds: float | None
    hierarchy_edges: int
    best: bool = False  # argmin mean time within its algorithm's grid


BENCH_COLUMNS = (
    "instance", "algorithm", "backend", "policy", "queries", "mean_time_us",
    "mean_settled", "mean_relaxed", "mean_stall_checks", "mean_min_vertices",
    "prep_seconds", "hierarchy_edges", "best",
)


@dataclass(frozen=True)
class BenchmarkReport:
    seed: int
    queries: int
    rows: tuple[BenchRow, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# seed={self.seed} queries={self.queries}\n")
        w = csv.writer(out)
        w.writerow(BENCH_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.instance, r.algorithm, r.backend, r.policy, r.queries,
                f"{r.mean_time_us:.3f}", f"{r.mean_settled:.3f}",
                f"{r.mean_relaxed:.3f}", f"{r.mean_stall_checks:.3f}",
                "" if r.mean_min_vertices is None else f"{r.mean_min_vertices:.3f}",
                "" if r.prep_seconds is None else f"{r.prep_seconds:.3f}",
                r.hierarchy_edges, int(r.best),
            ])
        return out.getvalue()


class _TruthCache:
    """Per-endpoint Dijkstra distance arrays for min-vertices counting.
    Sources repeat under sampling with replacement, so cache both sides."""

    def __init__(self, graph: Graph, backend: str | None):
        self.engine = DijkstraEngine(graph, backend=backend)
        self.fwd: dict[int, np.ndarray] = {}
        self.bwd: dict[int, np.ndarray] = {}

    def forward(self, s: int) -> np.ndarray:
        d = self.fwd.get(s)
        if d is None:
            d = self.engine.single_source(s).dist.copy()
            self.fwd[s] = d
        return d

    def backward(self, t: int) -> np.ndarray:
        d = self.bwd.get(t)
        if d is None:
            d = self.engine.single_source(t, backward=True).dist.copy()
            self.bwd[t] = d
        return d


def _eh_policy_rows(
    eh: EdgeHierarchy,
    graph: Graph | None,
    sources: np.ndarray,
    targets: np.ndarray,
    policies: Sequence[StallPolicy],
    *,
    backend: str | None,
    min_vertices: bool,
    instance: str,
    prep_seconds: float | None,
    workers: int,
) -> list[BenchRow]:
    backend = _backend.resolve_backend(backend)
    n = sources.shape[0]
    truth = None
    if min_vertices:
        if graph is None:
            raise ValueError("min-vertices accounting needs the input graph")
        truth = _TruthCache(graph, backend)
    rows = []
    for policy in policies:
        if workers > 1 and not min_vertices:
            settled, relaxed, stalls, elapsed = _parallel_counts(
                eh, sources, targets, policy, backend, workers
            )
            mv_mean = None
        else:
            q = EHQuery(eh, backend=backend)
            settled = relaxed = stalls = 0
            mv_total = 0
            elapsed = 0.0
            for i in range(n):
                r = q.query(int(sources[i]), int(targets[i]), policy,
                            with_trace=min_vertices)
                st = r.stats
                settled += st.settled
                relaxed += st.relaxed
                stalls += st.stall_checks
                elapsed += st.elapsed_seconds
                if min_vertices:
                    mv_total += count_min_vertices(
                        truth.forward(int(sources[i])),
                        truth.backward(int(targets[i])),
                        r.trace,
                    )
            mv_mean = (mv_total / n) if (min_vertices and n) else None
        rows.append(BenchRow(
            instance, "eh", backend, str(policy), n,
            (elapsed / n * 1e6) if n else 0.0,
            settled / n if n else 0.0,
            relaxed / n if n else 0.0,
            stalls / n if n else 0.0,
            mv_mean, prep_seconds, eh.edge_count,
        ))
    return rows


def _parallel_counts(eh, sources, targets, policy, backend, workers):
    """Counts-only pass over a worker pool; per-query latency is not
    meaningful under contention, so callers treat times as informational."""
    n = sources.shape[0]
    bounds = np.linspace(0, n, workers + 1).astype(int)

    def chunk(lo: int, hi: int):
        q = EHQuery(eh, backend=backend)
        s = r = c = 0
        e = 0.0
        for i in range(lo, hi):
            st = q.query(int(sources[i]), int(targets[i]), policy).stats
            s += st.settled
            r += st.relaxed
            c += st.stall_checks
            e += st.elapsed_seconds
        return s, r, c, e

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda b: chunk(*b), zip(bounds[:-1], bounds[1:])))
    settled = sum(p[0] for p in parts)
    relaxed = sum(p[1] for p in parts)
    stalls = sum(p[2] for p in parts)
    elapsed = sum(p[3] for p in parts)
    return settled, relaxed, stalls, elapsed


def _ch_rows(
    ch: ContractionHierarchy,
    sources: np.ndarray,
    targets: np.ndarray,
    *,
    backend: str | None,
    instance: str,
    prep_seconds: float | None,
) -> list[BenchRow]:
    backend = _backend.resolve_backend(backend)
    n = sources.shape[0]
    rows = []
    for stall in (True, False):
        q = CHQuery(ch, backend=backend)
        settled = relaxed = stalls = 0
        elapsed = 0.0
        for i in range(n):
            _, st, _ = q.query(int(sources[i]), int(targets[i]), stall=stall)
            settled += st.settled
            relaxed += st.relaxed
            stalls += st.stall_checks
            elapsed += st.elapsed_seconds
        rows.append(BenchRow(
            instance, "ch", backend, "stall" if stall else "none", n,
            (elapsed / n * 1e6) if n else 0.0,
            settled / n if n else 0.0,
            relaxed / n if n else 0.0,
            stalls / n if n else 0.0,
            None, prep_seconds, ch.edge_count,
        ))
    return rows


def _flag_best(rows: list[BenchRow]) -> tuple[BenchRow, ...]:
    out = list(rows)
    for algo in {r.algorithm for r in out}:
        group = [i for i, r in enumerate(out) if r.algorithm == algo]
        if not group or out[group[0]].queries == 0:
            continue
        best = min(group, key=lambda i: out[i].mean_time_us)
        out[best] = dataclasses.replace(out[best], best=True)
    return tuple(out)


def run_random_queries(
    hierarchy: EdgeHierarchy | ContractionHierarchy,
    graph: Graph | None,
    n: int,
    seed: int,
    policies: Sequence[StallPolicy] | None = None,
    *,
    ch: ContractionHierarchy | None = None,
    min_vertices: bool = False,
    backend: str | None = None,
    workers: int = 1,
    instance: str = "graph",
    prep_seconds: float | None = None,
    ch_prep_seconds: float | None = None,
) -> BenchmarkReport:
    """Replay n seeded pairs under every grid entry; the pair sequence is
    identical across entries.  The fastest configuration per algorithm is
    flagged in its row."""
    if n == 0:
        return BenchmarkReport(seed, 0, ())
    sources, targets = sample_pairs(hierarchy.vertex_count, n, seed)
    rows: list[BenchRow] = []
    if isinstance(hierarchy, EdgeHierarchy):
        rows.extend(_eh_policy_rows(
            hierarchy, graph, sources, targets,
            list(policies) if policies is not None else list(DEFAULT_POLICIES),
            backend=backend, min_vertices=min_vertices, instance=instance,
            prep_seconds=prep_seconds, workers=max(1, workers),
        ))
    else:
        rows.extend(_ch_rows(
            hierarchy, sources, targets, backend=backend,
            instance=instance, prep_seconds=prep_seconds,
        ))
    if ch is not None and not isinstance(hierarchy, ContractionHierarchy):
        rows.extend(_ch_rows(
            ch, sources, targets, backend=backend,
            instance=instance, prep_seconds=ch_prep_seconds,
        ))
    return BenchmarkReport(seed, n, _flag_best(rows))


@dataclass(frozen=True)
class RankRow:
    rank: int
    queries: int
    settled_q1: float
    settled_median: float
    settled_q3: float
    relaxed_q1: float
    relaxed_median: float
    relaxed_q3: float
    time_us_q1: float
    time_us_median: float
    time_us_q3: float


RANK_COLUMNS = (
    "rank", "queries", "settled_q1", "settled_median", "settled_q3",
    "relaxed_q1", "relaxed_median", "relaxed_q3",
    "time_us_q1", "time_us_median", "time_us_q3",
)


@dataclass(frozen=True)
class RankReport:
    seed: int
    num_sources: int
    rows: tuple[RankRow, ...]
    sources_without_ranks: int
    recheck_count: int
    recheck_mismatches: int
    # soft trend flag, reported not asserted
    median_settled_monotone: bool = True

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(
            f"# seed={self.seed} sources={self.num_sources}"
            f" sources_without_ranks={self.sources_without_ranks}"
            f" recheck={self.recheck_mismatches}/{self.recheck_count}"
            f" median_settled_monotone={int(self.median_settled_monotone)}\n"
        )
        w = csv.writer(out)
        w.writerow(RANK_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.rank, r.queries,
                f"{r.settled_q1:.1f}", f"{r.settled_median:.1f}", f"{r.settled_q3:.1f}",
                f"{r.relaxed_q1:.1f}", f"{r.relaxed_median:.1f}", f"{r.relaxed_q3:.1f}",
                f"{r.time_us_q1:.3f}", f"{r.time_us_median:.3f}", f"{r.time_us_q3:.3f}",
            ])
        return out.getvalue()


def rank_ladder(vertex_count: int) -> list[int]:
    """Powers of two from 64 up to 2^floor(log2 vertex_count)."""
    if vertex_count < 64:
        return []
    top = int(math.floor(math.log2(vertex_count)))
    return [1 << k for k in range(6, top + 1)]


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    med = statistics.median(values)
    if len(values) < 4:
        return min(values), med, max(values)
    q = statistics.quantiles(values, n=4, method="inclusive")
    return q[0], med, q[2]


def run_dijkstra_rank_bench(
    graph: Graph,
    hierarchy: EdgeHierarchy,
    num_sources: int,
    seed: int,
    *,
    policy: StallPolicy = STALL_NONE,
    backend: str | None = None,
    recheck_fraction: float = 0.01,
) -> RankReport:
    """For seeded random sources, query the target at every reachable
    power-of-two settle rank and report per-rank distributions.  A 1%
    seeded sample of queries is re-checked against the plain search's
    own distance array."""
    backend = _backend.resolve_backend(backend)
    ranks = rank_ladder(graph.vertex_count)
    rng = np.random.default_rng(seed)
    q = EHQuery(hierarchy, backend=backend)
    engine = DijkstraEngine(graph, backend=backend)
    per_rank: dict[int, list[tuple[int, int, float]]] = {r: [] for r in ranks}
    no_rank_sources = 0
    recheck = mismatches = 0
    for _ in range(num_sources):
        s = int(rng.integers(0, graph.vertex_count))
        res = engine.single_source(s)
        order = res.settle_order
        hit_any = False
        for r in ranks:
            if r > order.shape[0]:
                continue
            t = int(order[r - 1])
            hit_any = True
            qr = q.query(s, t, policy)
            per_rank[r].append(
                (qr.stats.settled, qr.stats.relaxed, qr.stats.elapsed_seconds)
            )
            if float(rng.random()) < recheck_fraction:
                recheck += 1
                if qr.distance != int(res.dist[t]):
                    mismatches += 1
        if not hit_any:
            no_rank_sources += 1
    rows = []
    last_med = -1.0
    monotone = True
    for r in ranks:
        samples = per_rank[r]
        if not samples:
            continue
        s1, sm, s3 = _quartiles([float(x[0]) for x in samples])
        r1, rm, r3 = _quartiles([float(x[1]) for x in samples])
        t1, tm, t3 = _quartiles([x[2] * 1e6 for x in samples])
        if sm < last_med:
            monotone = False
        last_med = sm
        rows.append(RankRow(r, len(samples), s1, sm, s3, r1, rm, r3, t1, tm, t3))
    return RankReport(
        seed, num_sources, tuple(rows), no_rank_sources,
        recheck, mismatches, monotone,
    )


@dataclass(frozen=True)
class VerifyReport:
    seed: int
    pairs: int
    checked: int
    mismatches: tuple[tuple[int, int, str, int, int], ...]  # (s, t, config, got, want)
    unpack_failures: tuple[tuple[int, int, str], ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.unpack_failures

    def summary(self) -> str:
        lines = [
            f"seed={self.seed} pairs={self.pairs} comparisons={self.checked}",
            f"mismatches={len(self.mismatches)} unpack_failures={len(self.unpack_failures)}",
        ]
        for s, t, cfg, got, want in self.mismatches[:20]:
            lines.append(f"MISMATCH {cfg} {s}->{t}: got {got}, oracle {want}")
        for s, t, cfg in self.unpack_failures[:20]:
            lines.append(f"BAD PATH {cfg} {s}->{t}")
        return "\n".join(lines)


VERIFY_POLICIES = (
    StallPolicy("none"),
    StallPolicy("on-demand"),
    StallPolicy("in-advance"),
    StallPolicy("partial", 0.5),
)


def verify_against_oracle(
    hierarchy: EdgeHierarchy | ContractionHierarchy,
    graph: Graph,
    n: int,
    seed: int,
    *,
    ch: ContractionHierarchy | None = None,
    backend: str | None = None,
) -> VerifyReport:
    """Compare hierarchy answers on n seeded pairs to a plain
    bidirectional search on the input graph; EH paths are also unpacked
    and walked edge by edge."""
    backend = _backend.resolve_backend(backend)
    engine = DijkstraEngine(graph, backend=backend)
    sources, targets = sample_pairs(graph.vertex_count, n, seed)
    n = sources.shape[0]  # vacuous on the empty graph
    edge_w = {
        (int(graph.tail[e]), int(graph.head[e])): int(graph.weight[e])
        for e in range(graph.edge_count)
    }
    mismatches: list[tuple[int, int, str, int, int]] = []
    bad_paths: list[tuple[int, int, str]] = []
    checked = 0

    eh_q = EHQuery(hierarchy, backend=backend) if isinstance(hierarchy, EdgeHierarchy) else None
    ch_queries: list[tuple[str, CHQuery]] = []
    if isinstance(hierarchy, ContractionHierarchy):
        ch_queries.append(("ch", CHQuery(hierarchy, backend=backend)))
    if ch is not None:
        ch_queries.append(("ch", CHQuery(ch, backend=backend)))

    for i in range(n):
        s, t = int(sources[i]), int(targets[i])
        want = engine.distance(s, t)
        if eh_q is not None:
            for policy in VERIFY_POLICIES:
                cfg = f"eh/{policy}"
                r = eh_q.query(s, t, policy, with_path=(policy.kind == "none"))
                checked += 1
                if r.distance != want:
                    mismatches.append((s, t, cfg, r.distance, want))
                elif r.reachable and policy.kind == "none":
                    if not _walk_ok(eh_q, r, s, t, edge_w):
                        bad_paths.append((s, t, cfg))
        for cfg, chq in ch_queries:
            d = chq.distance(s, t)
            checked += 1
            if d != want:
                mismatches.append((s, t, cfg, d, want))
    return VerifyReport(seed, n, checked, tuple(mismatches), tuple(bad_paths))


def _walk_ok(q: EHQuery, result, s: int, t: int, edge_w: dict) -> bool:
    try:
        walk = q.unpack(result)
    except Exception:
        return False
    if result.distance == 0 and s == t:
        return walk == []
    at = s
    total = 0
    for u, v, w in walk:
        if u != at or edge_w.get((u, v)) != w:
            return False
        at = v
        total += w
    return at == t and total == result.distance


def grid_graph(width: int, height: int, seed: int, wmax: int = 100) -> Graph:
    """Bidirected 4-neighbor grid with seeded integer weights in
    1..wmax; a small stand-in for road-like instances."""
    rng = np.random.default_rng(seed)
    triples = []

    def vid(x: int, y: int) -> int:
        return y * width + x

    for y in range(height):
        for x in range(width):
            if x + 1 < width:
                a, b = vid(x, y), vid(x + 1, y)
                triples.append((a, b, int(rng.integers(1, wmax + 1))))
                triples.append((b, a, int(rng.integers(1, wmax + 1))))
            if y + 1 < height:
                a, b = vid(x, y), vid(x, y + 1)
                triples.append((a, b, int(rng.integers(1, wmax + 1))))
                triples.append((b, a, int(rng.integers(1, wmax + 1))))
    return make_graph(width * height, triples)


@dataclass(frozen=True)
class BackendRow:
    backend: str
    build_seconds: float
    mean_query_us: float
    mean_settled: float


BACKEND_COLUMNS = ("backend", "build_seconds", "mean_query_us", "mean_settled")


def backend_rows_to_csv(rows: Sequence[BackendRow]) -> str:
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(BACKEND_COLUMNS)
    for r in rows:
        w.writerow([
            r.backend, f"{r.build_seconds:.3f}",
            f"{r.mean_query_us:.3f}", f"{r.mean_settled:.3f}",
        ])
    return out.getvalue()


def compare_backends(
    graph: Graph,
    n_queries: int,
    seed: int,
    backends: Sequence[str] | None = None,
) -> list[BackendRow]:
    """Build the hierarchy and time queries on every available kernel
    implementation; counts must agree across rows or the slower kernel
    is not a faithful mirror."""
    rows = []
    names = list(backends) if backends is not None else _backend.available_backends()
    for name in names:
        t0 = time.perf_counter()
        eh = build_edge_hierarchy(graph, backend=name)
        build = time.perf_counter() - t0
        q = EHQuery(eh, backend=name)
        sources, targets = sample_pairs(graph.vertex_count, n_queries, seed)
        settled = 0
        elapsed = 0.0
        for i in range(n_queries):
            r = q.query(int(sources[i]), int(targets[i]), STALL_NONE)
            settled += r.stats.settled
            elapsed += r.stats.elapsed_seconds
        rows.append(BackendRow(
            name, build,
            (elapsed / n_queries * 1e6) if n_queries else 0.0,
            settled / n_queries if n_queries else 0.0,
        ))
    return rows
