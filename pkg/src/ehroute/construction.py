"""Edge-rank hierarchy construction.

Edges are ranked in rounds: at the start of a round every unranked edge
gets a simulated shortcut count, the round selects exactly the edges
whose count is a local minimum (no incident unranked edge has a strictly
smaller count), and ranks them in ascending edge id.  Ranking an edge
(u, v) enumerates unranked in-edges (u2, u) and out-edges (v, v2); every
pair whose three-edge path realizes the exact distance u2 -> v2 needs a
bypass edge (u2, v) or (u, v2).  Existing edges are reused (weight
lowered to the exact bypass distance, rank cleared); the remaining pairs
form a bipartite instance whose minimum vertex cover decides which new
shortcuts appear.  Shortcut weights equal true distances by
construction, so distances never change and one oracle built on the
input graph stays exact throughout.

The stepwise path below is the reference; the compiled backend fuses the
same procedure into one kernel (see _backend) and parity tests hold the
two to identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .dijkstra import DijkstraEngine
from .graph import Graph
from .hierarchy import EdgeHierarchy, finalize_edge_hierarchy
from .matching import build_instance, max_matching, min_vertex_cover

UNRANKED = -1

@dataclass
class ShortcutCandidates:
    """Everything rank_edge decides from: pairs still needing a bypass,
    the bypass weights per side, and reuse adjustments for bypasses that
    already exist as edges."""

    edge: int
    pairs: list[tuple[int, int]]
    left_weight: dict[int, int]  # u2 -> weight of bypass (u2, v)
    right_weight: dict[int, int]  # v2 -> weight of bypass (u, v2)
    reuses: list[tuple[int, int, int]]  # (eid, exact weight, via vertex)

class ConstructionState:
    __slots__ = (
        "vertex_count", "tail", "head", "weight", "rank", "via",
        "out_edges", "in_edges", "edge_map", "next_rank", "unranked_count",
        "oracle",
    )

    def __init__(self, graph: Graph, oracle):
        n = graph.vertex_count
        self.vertex_count = n
        self.tail: list[int] = graph.tail.tolist()
        self.head: list[int] = graph.head.tolist()
        self.weight: list[int] = graph.weight.tolist()
        m = len(self.tail)
        self.rank: list[int] = [UNRANKED] * m
        self.via: list[int] = [-1] * m
        self.out_edges: list[list[int]] = [[] for _ in range(n)]
        self.in_edges: list[list[int]] = [[] for _ in range(n)]
        self.edge_map: dict[tuple[int, int], int] = {}
        for e in range(m):
            u, v = self.tail[e], self.head[e]
            self.out_edges[u].append(e)
            self.in_edges[v].append(e)
            self.edge_map[(u, v)] = e
        self.next_rank = 0
        self.unranked_count = m
        self.oracle = oracle

    @property
    def edge_count(self) -> int:
        return len(self.tail)

def init_construction(graph: Graph, oracle) -> ConstructionState:
    return ConstructionState(graph, oracle)

def collect_shortcut_candidates(state: ConstructionState, e: int) -> ShortcutCandidates:
    """Read-only scan of the pairs around edge e on the current graph."""
    u, v = state.tail[e], state.head[e]
    w_e = state.weight[e]
    rank = state.rank
    tail, head, weight = state.tail, state.head, state.weight
    edge_map = state.edge_map
    dist = state.oracle.distance
    pairs: list[tuple[int, int]] = []
    left_weight: dict[int, int] = {}
    right_weight: dict[int, int] = {}
    reuses: list[tuple[int, int, int]] = []
    reuse_seen: set[int] = set()
    for ein in state.in_edges[u]:
        if rank[ein] != UNRANKED:
            continue
        u2 = tail[ein]
        if u2 == v:
            continue  # bypass (u2, v) would be a self-loop
        w_in = weight[ein]
        for eout in state.out_edges[v]:
            if rank[eout] != UNRANKED:
                continue
            v2 = head[eout]
            if v2 == u or v2 == u2:
                continue  # self-loop bypass / trivial pair
            w_out = weight[eout]
            if dist(u2, v2) != w_in + w_e + w_out:
                continue
            left = edge_map.get((u2, v))
            if left is not None:
                if left not in reuse_seen:
                    reuse_seen.add(left)
                    reuses.append((left, w_in + w_e, u))
                continue
            right = edge_map.get((u, v2))
            if right is not None:
                if right not in reuse_seen:
                    reuse_seen.add(right)
                    reuses.append((right, w_e + w_out, v))
                continue
            pairs.append((u2, v2))
            left_weight[u2] = w_in + w_e
            right_weight[v2] = w_e + w_out
    return ShortcutCandidates(e, pairs, left_weight, right_weight, reuses)

def count_shortcuts_for_edge(state: ConstructionState, e: int) -> int:
    """Shortcuts that ranking e right now would insert: the minimum
    vertex cover size of its pair instance (computed as the equal
    matching size).  Reuse adjustments do not count."""
    cands = collect_shortcut_candidates(state, e)
    if not cands.pairs:
        return 0
    match_r = max_matching(build_instance(cands.pairs))
    return sum(1 for li in match_r if li >= 0)

def select_round_edges(state: ConstructionState) -> list[int]:
    """Edges whose simulated count is minimal among all unranked edges
    sharing an endpoint with them, in ascending edge id.  Counts are
    frozen at round start: mutations during the round do not re-enter."""
    rank = state.rank
    unranked = [e for e in range(state.edge_count) if rank[e] == UNRANKED]
    counts = {e: count_shortcuts_for_edge(state, e) for e in unranked}
    selected = []
    for e in unranked:
        u, v = state.tail[e], state.head[e]
        c = counts[e]
        ok = True
        for lst in (state.out_edges[u], state.in_edges[u],
                    state.out_edges[v], state.in_edges[v]):
            for e2 in lst:
                if e2 != e and rank[e2] == UNRANKED and counts[e2] < c:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            selected.append(e)
    return selected

def _insert_edge(state: ConstructionState, u: int, v: int, w: int, via: int) -> int:
    assert (u, v) not in state.edge_map and u != v
    eid = state.edge_count
    state.tail.append(u)
    state.head.append(v)
    state.weight.append(w)
    state.rank.append(UNRANKED)
    state.via.append(via)
    state.out_edges[u].append(eid)
    state.in_edges[v].append(eid)
    state.edge_map[(u, v)] = eid
    state.unranked_count += 1
    return eid

def apply_shortcuts(
    state: ConstructionState,
    cands: ShortcutCandidates,
    cover: tuple[tuple[int, ...], tuple[int, ...]],
) -> list[tuple]:
    """Mutate the graph for one ranking event; returns the event log.

    Reuses first: weight lowered to the exact bypass distance (never
    raised; the pair test guarantees the existing weight is an upper
    bound), via rewritten only on a strict decrease so witness chains
    stay acyclic, rank cleared unconditionally.  Then one new edge per
    cover vertex, left side then right side, ascending ids.
    """
    e = cands.edge
    u, v = state.tail[e], state.head[e]
    events: list[tuple] = []
    for eid, new_w, via in cands.reuses:
        old_w = state.weight[eid]
        old_rank = state.rank[eid]
        if new_w > old_w:
            raise AssertionError(
                f"reuse of edge {eid} would raise its weight {old_w} -> {new_w}"
            )
        if new_w < old_w:
            state.weight[eid] = new_w
            state.via[eid] = via
        if old_rank != UNRANKED:
            state.rank[eid] = UNRANKED
            state.unranked_count += 1
        events.append(("reuse", eid, old_w, new_w, old_rank))
    cover_left, cover_right = cover
    for u2 in cover_left:
        w = cands.left_weight[u2]
        eid = _insert_edge(state, u2, v, w, via=u)
        events.append(("insert", eid, u2, v, w, u))
    for v2 in cover_right:
        w = cands.right_weight[v2]
        eid = _insert_edge(state, u, v2, w, via=v)
        events.append(("insert", eid, u, v2, w, v))
    return events

def rank_edge(state: ConstructionState, e: int) -> list[tuple]:
    if state.rank[e] != UNRANKED:
        raise ValueError(f"edge {e} is already ranked")
    cands = collect_shortcut_candidates(state, e)
    cover = min_vertex_cover(build_instance(cands.pairs))
    events = apply_shortcuts(state, cands, cover)
    state.rank[e] = state.next_rank
    state.next_rank += 1
    state.unranked_count -= 1
    return events

def run_construction(state: ConstructionState) -> list[tuple[int, int, int]]:
    """Rank every edge; returns the round log as (round, selected,
    unranked-at-start) rows."""
    round_log: list[tuple[int, int, int]] = []
    rounds = 0
    events = 0
    cap = 50 * (state.edge_count + state.vertex_count) + 10000
    while state.unranked_count:
        selected = select_round_edges(state)
        if not selected:
            raise RuntimeError("round selected no edges; selection rule violated")
        round_log.append((rounds, len(selected), state.unranked_count))
        for e in selected:
            rank_edge(state, e)
            events += 1
            if events > cap:
                raise RuntimeError("construction exceeded its rank-event budget")
        rounds += 1
    return round_log

class _CHOracle:
    """Exact point-to-point oracle backed by a contraction hierarchy
    built once on the input graph (construction never changes
    distances, so it stays valid)."""

    def __init__(self, graph: Graph, backend: str | None):
        from .ch import CHQuery, build_contraction_hierarchy

        self._query = CHQuery(build_contraction_hierarchy(graph, backend=backend),
                              backend=backend)

    def distance(self, s: int, t: int) -> int:
        return self._query.distance(s, t)

def make_distance_oracle(graph: Graph, kind: str, backend: str | None = None):
    if kind == "dijkstra":
        return DijkstraEngine(graph, backend)
    if kind == "ch":
        return _CHOracle(graph, backend)
    raise ValueError(f"unknown oracle kind {kind!r}")

def build_edge_hierarchy(
    graph: Graph,
    *,
    oracle: str = "ch",
    backend: str | None = None,
    workers: int | None = None,
) -> EdgeHierarchy:
    """Full preprocessing: rank all edges, then finalize (DFS renumber,
    rank-sorted adjacency).  oracle picks the construction distance
    oracle: "ch" (default) or "dijkstra"; both yield identical output."""
    backend = _backend.resolve_backend(backend)
    if oracle not in ("ch", "dijkstra"):
        raise ValueError(f"unknown oracle kind {oracle!r}")
    kern = _backend.kernels(backend)
    if backend == "compiled":
        from .ch import PRIORITY_COEFFS, WITNESS_SETTLE_BUDGET

        tail, head, weight, rank, via, log = kern.eh_build(
            graph.vertex_count, graph.tail, graph.head, graph.weight,
            1 if oracle == "ch" else 0,
            WITNESS_SETTLE_BUDGET, *PRIORITY_COEFFS,
            _backend.worker_count(workers),
        )
        round_log = tuple(
            (int(log[i, 0]), int(log[i, 1]), int(log[i, 2]))
            for i in range(log.shape[0])
        )
    else:
        state = init_construction(graph, make_distance_oracle(graph, oracle, backend))
        round_log = tuple(run_construction(state))
        tail = np.array(state.tail, dtype=np.int64)
        head = np.array(state.head, dtype=np.int64)
        weight = np.array(state.weight, dtype=np.int64)
        rank = np.array(state.rank, dtype=np.int64)
        via = np.array(state.via, dtype=np.int64)
    return finalize_edge_hierarchy(
        graph.vertex_count, tail, head, weight, rank, via, round_log
    )
