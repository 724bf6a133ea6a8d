"""Contraction-order hierarchy baseline.

Vertices are contracted one at a time, cheapest first by the priority
2 * edge difference + hop total of counted shortcuts + level, with lazy
invalidation: neighbors of a contracted vertex get fresh priorities,
stale heap entries are skipped on pop.  Witness searches are budgeted
(settle cap below) and exclude the contracted vertex; a shortcut (a, b)
appears only when no witness path of length <= w(a, v) + w(v, b)
survives, so every stored weight is a real path length and upward
queries stay exact.  Doubles as the construction distance oracle for
edge-rank preprocessing.
"""

from __future__ import annotations

import heapq
import time

import numpy as np

from . import _backend
from .graph import Graph, INF
from .hierarchy import (
    ContractionHierarchy,
    QueryStats,
    finalize_contraction_hierarchy,
)

WITNESS_SETTLE_BUDGET = 50
# priority = 2 * edge_difference + 1 * shortcut hop total + 1 * level
PRIORITY_COEFFS = (2, 1, 1)

class ContractionState:
    __slots__ = ("vertex_count", "out_maps", "in_maps", "level", "order",
                 "contracted", "priority", "edges", "position")

    def __init__(self, graph: Graph):
        n = graph.vertex_count
        self.vertex_count = n
        # overlay adjacency: value is (weight, via, hops)
        self.out_maps: list[dict[int, tuple[int, int, int]]] = [{} for _ in range(n)]
        self.in_maps: list[dict[int, tuple[int, int, int]]] = [{} for _ in range(n)]
        for e in range(graph.edge_count):
            u, v, w = int(graph.tail[e]), int(graph.head[e]), int(graph.weight[e])
            self.out_maps[u][v] = (w, -1, 1)
            self.in_maps[v][u] = (w, -1, 1)
        self.level = [0] * n
        self.order = [-1] * n
        self.contracted = [False] * n
        self.priority = [0] * n
        self.edges: list[tuple[int, int, int, int]] = []
        self.position = 0

def _witness_labels(
    state: ContractionState, source: int, excluded: int, cap: int, budget: int
) -> dict[int, int]:
    """Budgeted Dijkstra from source over the overlay, skipping the
    excluded vertex; stops past cap or after the settle budget.  All
    labels are real path lengths, so using unsettled ones is safe."""
    dist = {source: 0}
    heap = [(0, source)]
    settled = 0
    while heap:
        d, x = heapq.heappop(heap)
        if d != dist[x]:
            continue
        if d > cap:
            break
        settled += 1
        for y, (w, _, _) in sorted(state.out_maps[x].items()):
            if y == excluded:
                continue
            nd = d + w
            if nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
        if settled >= budget:
            break
    return dist

def _shortcut_scan(state: ContractionState, v: int, apply: bool) -> tuple[int, int]:
    """Count (and with apply, insert) the shortcuts contracting v needs.
    A pair (a, b) counts when the witness labels leave it strictly above
    w(a, v) + w(v, b); insertion lowers an existing overlay edge or adds
    a new one, via = v."""
    ins = sorted(state.in_maps[v].items())
    outs = sorted(state.out_maps[v].items())
    count = 0
    hops_total = 0
    for a, (w_in, _, hops_in) in ins:
        cap = 0
        for b, (w_out, _, _) in outs:
            if b != a and w_in + w_out > cap:
                cap = w_in + w_out
        labels = _witness_labels(state, a, v, cap, WITNESS_SETTLE_BUDGET)
        for b, (w_out, _, hops_out) in outs:
            if b == a:
                continue
            path = w_in + w_out
            if labels.get(b, INF) > path:
                count += 1
                hops_total += hops_in + hops_out
                if apply:
                    existing = state.out_maps[a].get(b)
                    if existing is None or path < existing[0]:
                        entry = (path, v, hops_in + hops_out)
                        state.out_maps[a][b] = entry
                        state.in_maps[b][a] = entry
    return count, hops_total

def vertex_priority(state: ContractionState, v: int) -> int:
    count, hops_total = _shortcut_scan(state, v, apply=False)
    removed = len(state.in_maps[v]) + len(state.out_maps[v])
    c_diff, c_hops, c_level = PRIORITY_COEFFS
    return c_diff * (count - removed) + c_hops * hops_total + c_level * state.level[v]

def contract_vertex(state: ContractionState, v: int) -> list[int]:
    """Finalize v's overlay edges into the hierarchy, insert its
    shortcuts, detach it.  Returns the affected neighbors (their levels
    are bumped here; the caller refreshes their priorities)."""
    _shortcut_scan(state, v, apply=True)
    for a, (w, via, _) in sorted(state.in_maps[v].items()):
        state.edges.append((a, v, w, via))
    for b, (w, via, _) in sorted(state.out_maps[v].items()):
        state.edges.append((v, b, w, via))
    neighbors = sorted(set(state.in_maps[v]) | set(state.out_maps[v]))
    for x in neighbors:
        state.out_maps[x].pop(v, None)
        state.in_maps[x].pop(v, None)
    state.out_maps[v] = {}
    state.in_maps[v] = {}
    state.order[v] = state.position
    state.position += 1
    state.contracted[v] = True
    for x in neighbors:
        if state.level[v] + 1 > state.level[x]:
            state.level[x] = state.level[v] + 1
    return neighbors

def build_contraction_hierarchy_stepwise(
    graph: Graph,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    state = ContractionState(graph)
    n = graph.vertex_count
    heap: list[tuple[int, int]] = []
    for v in range(n):
        state.priority[v] = vertex_priority(state, v)
        heap.append((state.priority[v], v))
    heapq.heapify(heap)
    while state.position < n:
        p, v = heapq.heappop(heap)
        if state.contracted[v] or p != state.priority[v]:
            continue
        # neighbors' overlays and levels change under contraction;
        # refresh their priorities eagerly
        for x in contract_vertex(state, v):
            state.priority[x] = vertex_priority(state, x)
            heapq.heappush(heap, (state.priority[x], x))
    order = np.array(state.order, dtype=np.int64)
    if state.edges:
        tail, head, weight, via = (np.array(col, dtype=np.int64) for col in zip(*state.edges))
    else:
        tail = head = weight = via = np.empty(0, dtype=np.int64)
    return order, tail, head, weight, via

def build_contraction_hierarchy(
    graph: Graph, *, backend: str | None = None
) -> ContractionHierarchy:
    backend = _backend.resolve_backend(backend)
    kern = _backend.kernels(backend)
    if backend == "compiled":
        order, tail, head, weight, via = kern.ch_build(
            graph.vertex_count, graph.tail, graph.head, graph.weight,
            WITNESS_SETTLE_BUDGET, *PRIORITY_COEFFS,
        )
    else:
        order, tail, head, weight, via = build_contraction_hierarchy_stepwise(graph)
    return finalize_contraction_hierarchy(graph.vertex_count, order, tail, head, weight, via)

class CHQuery:
    def __init__(self, ch: ContractionHierarchy, backend: str | None = None):
        self.hierarchy = ch
        self.backend = _backend.resolve_backend(backend)
        kern = _backend.kernels(self.backend)
        self._kern = kern
        uo, ui = ch.up_out_eids, ch.up_in_eids
        self._view = kern.prepare_ch(
            ch.up_out_indptr, ch.head[uo], ch.weight[uo],
            ch.up_in_indptr, ch.tail[ui], ch.weight[ui],
        )
        self._ws = kern.make_ch_workspace(ch.vertex_count)

    def query(
        self, s: int, t: int, *, stall: bool = True, with_trace: bool = False
    ) -> tuple[int, QueryStats, tuple | None]:
        n = self.hierarchy.vertex_count
        if not (0 <= s < n and 0 <= t < n):
            raise ValueError(f"vertex out of range 0..{n - 1}")
        t0 = time.perf_counter()
        dist, meet, settled, relaxed, stall_checks, trace = self._kern.ch_query(
            self._view, self._ws, s, t, stall, with_trace
        )
        stats = QueryStats(
            settled=settled,
            relaxed=relaxed,
            stall_checks=stall_checks,
            elapsed_seconds=time.perf_counter() - t0,
        )
        return dist, stats, trace

    def distance(self, s: int, t: int, *, stall: bool = True) -> int:
        dist, _, _ = self.query(s, t, stall=stall)
        return dist
