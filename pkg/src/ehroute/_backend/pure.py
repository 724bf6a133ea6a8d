"""Pure-Python search kernels.

Reference mirror of the compiled extension: same algorithms, same
deterministic tie-breaking, same counter semantics.  Heap entries carry
(distance, tie-break keys, vertex) so that settle order is a pure
function of the input everywhere.  Label arrays live in reusable
workspaces validated by generation stamps, so repeated queries cost
O(search size), not O(n).
"""

from __future__ import annotations

import heapq
import math

import numpy as np

INF = 1 << 62

POLICY_NONE = 0
POLICY_ON_DEMAND = 1
POLICY_IN_ADVANCE = 2
POLICY_PARTIAL = 3


def stall_prefix_len(frac: float, degree: int) -> int:
    """ceil(frac * degree) with a guard against float representation
    noise; shared definition across backends."""
    if degree <= 0:
        return 0
    k = math.ceil(frac * degree - 1e-9)
    if k < 0:
        return 0
    return degree if k > degree else k


# ---------------------------------------------------------------------------
# Prepared adjacency views (python lists: scalar access beats numpy here)


class CsrView:
    __slots__ = ("n", "indptr", "target", "weight")

    def __init__(self, indptr: np.ndarray, target: np.ndarray, weight: np.ndarray):
        self.n = len(indptr) - 1
        self.indptr = indptr.tolist()
        self.target = target.tolist()
        self.weight = weight.tolist()


def prepare_csr(indptr: np.ndarray, target: np.ndarray, weight: np.ndarray) -> CsrView:
    return CsrView(indptr, target, weight)


class EhView:
    """Both directions of a finalized hierarchy.

    Adjacency is sorted by descending edge rank within each vertex, so a
    search scans the feasible prefix and stops at the first edge below
    its vertex rank label.
    """

    __slots__ = ("n", "indptr", "target", "weight", "rank")

    def __init__(self, fwd, bwd):
        self.n = len(fwd[0]) - 1
        self.indptr = (fwd[0].tolist(), bwd[0].tolist())
        self.target = (fwd[1].tolist(), bwd[1].tolist())
        self.weight = (fwd[2].tolist(), bwd[2].tolist())
        self.rank = (fwd[3].tolist(), bwd[3].tolist())


def prepare_eh(fwd_indptr, fwd_target, fwd_weight, fwd_rank,
               bwd_indptr, bwd_target, bwd_weight, bwd_rank) -> EhView:
    return EhView((fwd_indptr, fwd_target, fwd_weight, fwd_rank),
                  (bwd_indptr, bwd_target, bwd_weight, bwd_rank))


class ChView:
    __slots__ = ("n", "indptr", "target", "weight")

    def __init__(self, fwd, bwd):
        self.n = len(fwd[0]) - 1
        self.indptr = (fwd[0].tolist(), bwd[0].tolist())
        self.target = (fwd[1].tolist(), bwd[1].tolist())
        self.weight = (fwd[2].tolist(), bwd[2].tolist())


def prepare_ch(up_out_indptr, up_out_target, up_out_weight,
               up_in_indptr, up_in_target, up_in_weight) -> ChView:
    return ChView((up_out_indptr, up_out_target, up_out_weight),
                  (up_in_indptr, up_in_target, up_in_weight))


# ---------------------------------------------------------------------------
# Workspaces


class BidiWorkspace:
    __slots__ = ("n", "dist", "gen", "generation")

    def __init__(self, n: int):
        self.n = n
        self.dist = ([0] * n, [0] * n)
        self.gen = ([0] * n, [0] * n)
        self.generation = 0


def make_bidi_workspace(n: int) -> BidiWorkspace:
    return BidiWorkspace(n)


class EhWorkspace:
    __slots__ = ("n", "dist", "rankl", "stall", "parent", "gen", "sgen",
                 "egen", "estamp", "generation")

    def __init__(self, n: int):
        self.n = n
        self.dist = ([0] * n, [0] * n)
        self.rankl = ([0] * n, [0] * n)
        self.stall = ([0] * n, [0] * n)
        self.parent = ([-1] * n, [-1] * n)
        self.gen = ([0] * n, [0] * n)
        self.sgen = ([0] * n, [0] * n)
        # per-edge stamps, sized lazily; only used by the single-relax check
        self.egen: tuple[list[int], list[int]] | None = None
        self.estamp = 0
        self.generation = 0


def make_eh_workspace(n: int) -> EhWorkspace:
    return EhWorkspace(n)


class ChWorkspace:
    __slots__ = ("n", "dist", "gen", "generation")

    def __init__(self, n: int):
        self.n = n
        self.dist = ([0] * n, [0] * n)
        self.gen = ([0] * n, [0] * n)
        self.generation = 0


def make_ch_workspace(n: int) -> ChWorkspace:
    return ChWorkspace(n)


# ---------------------------------------------------------------------------
# Plain Dijkstra


def dijkstra(csr: CsrView, source: int):
    """Full single-source run.  Returns (dist, parent_slot, order) where
    parent_slot[v] is the CSR slot of the edge that first set v's final
    distance (-1 at the source/unreached) and order lists vertices in
    settle sequence.  Ties settle by vertex id.
    """
    n = csr.n
    indptr, target, weight = csr.indptr, csr.target, csr.weight
    dist = [INF] * n
    parent = [-1] * n
    order: list[int] = []
    dist[source] = 0
    heap: list[tuple[int, int]] = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d != dist[u]:
            continue
        order.append(u)
        for slot in range(indptr[u], indptr[u + 1]):
            v = target[slot]
            nd = d + weight[slot]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = slot
                heapq.heappush(heap, (nd, v))
    return (
        np.array(dist, dtype=np.int64),
        np.array(parent, dtype=np.int64),
        np.array(order, dtype=np.int64),
    )


def bidi_distance(fcsr: CsrView, bcsr: CsrView, s: int, t: int,
                  ws: BidiWorkspace) -> int:
    """Bidirectional Dijkstra distance only; workspace reused across calls."""
    if s == t:
        return 0
    ws.generation += 1
    cur = ws.generation
    dist_f, dist_b = ws.dist
    gen_f, gen_b = ws.gen
    dist_f[s] = 0
    gen_f[s] = cur
    dist_b[t] = 0
    gen_b[t] = cur
    fheap: list[tuple[int, int]] = [(0, s)]
    bheap: list[tuple[int, int]] = [(0, t)]
    best = INF
    fi, ft, fw = fcsr.indptr, fcsr.target, fcsr.weight
    bi, bt, bw = bcsr.indptr, bcsr.target, bcsr.weight
    while True:
        active_f = bool(fheap) and fheap[0][0] < best
        active_b = bool(bheap) and bheap[0][0] < best
        if not active_f and not active_b:
            break
        forward = active_f and (not active_b or fheap[0][0] <= bheap[0][0])
        if forward:
            d, u = heapq.heappop(fheap)
            if gen_f[u] != cur or d != dist_f[u]:
                continue
            for slot in range(fi[u], fi[u + 1]):
                v = ft[slot]
                nd = d + fw[slot]
                if gen_f[v] != cur or nd < dist_f[v]:
                    dist_f[v] = nd
                    gen_f[v] = cur
                    heapq.heappush(fheap, (nd, v))
                    if gen_b[v] == cur and nd + dist_b[v] < best:
                        best = nd + dist_b[v]
        else:
            d, u = heapq.heappop(bheap)
            if gen_b[u] != cur or d != dist_b[u]:
                continue
            for slot in range(bi[u], bi[u + 1]):
                v = bt[slot]
                nd = d + bw[slot]
                if gen_b[v] != cur or nd < dist_b[v]:
                    dist_b[v] = nd
                    gen_b[v] = cur
                    heapq.heappush(bheap, (nd, v))
                    if gen_f[v] == cur and nd + dist_f[v] < best:
                        best = nd + dist_f[v]
    return best


def bidi_with_parents(fcsr: CsrView, bcsr: CsrView, s: int, t: int):
    """Bidirectional Dijkstra returning (dist, meet, fparent, bparent)
    with parent CSR slots for path extraction; allocates per call."""
    n = fcsr.n
    dist_f = [INF] * n
    dist_b = [INF] * n
    par_f = [-1] * n
    par_b = [-1] * n
    if s == t:
        return 0, s, np.array(par_f, dtype=np.int64), np.array(par_b, dtype=np.int64)
    dist_f[s] = 0
    dist_b[t] = 0
    fheap: list[tuple[int, int]] = [(0, s)]
    bheap: list[tuple[int, int]] = [(0, t)]
    best = INF
    meet = -1
    fi, ft, fw = fcsr.indptr, fcsr.target, fcsr.weight
    bi, bt, bw = bcsr.indptr, bcsr.target, bcsr.weight
    while True:
        active_f = bool(fheap) and fheap[0][0] < best
        active_b = bool(bheap) and bheap[0][0] < best
        if not active_f and not active_b:
            break
        forward = active_f and (not active_b or fheap[0][0] <= bheap[0][0])
        if forward:
            d, u = heapq.heappop(fheap)
            if d != dist_f[u]:
                continue
            for slot in range(fi[u], fi[u + 1]):
                v = ft[slot]
                nd = d + fw[slot]
                if nd < dist_f[v]:
                    dist_f[v] = nd
                    par_f[v] = slot
                    heapq.heappush(fheap, (nd, v))
                    if nd + dist_b[v] < best:
                        best = nd + dist_b[v]
                        meet = v
        else:
            d, u = heapq.heappop(bheap)
            if d != dist_b[u]:
                continue
            for slot in range(bi[u], bi[u + 1]):
                v = bt[slot]
                nd = d + bw[slot]
                if nd < dist_b[v]:
                    dist_b[v] = nd
                    par_b[v] = slot
                    heapq.heappush(bheap, (nd, v))
                    if nd + dist_f[v] < best:
                        best = nd + dist_f[v]
                        meet = v
    return (
        best,
        meet,
        np.array(par_f, dtype=np.int64),
        np.array(par_b, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# Hierarchy query


def eh_query(eh: EhView, ws: EhWorkspace, s: int, t: int, policy: int,
             frac: float, want_parents: bool, want_trace: bool,
             check_single_relax: bool = False):
    """Rank-pruned bidirectional search over a finalized hierarchy.

    Heap entries are (dist, rank label, vertex); a popped entry is acted
    on only when both keys match the current labels, which makes every
    vertex expand exactly once, at its final (dist, rank), even with
    zero-weight edges.  Relaxing an edge updates the target's rank label
    to the edge rank, taking the minimum on distance ties; parents track
    the same minimum-rank witness so extracted paths stay up-down.

    policy: 0 none, 1 stall on demand, 2 stall in advance, 3 partial
    (frac of the opposite adjacency, highest ranks first).

    Returns (dist, meet, settled, relaxed, stall_checks, fpar, bpar,
    trace); fpar/bpar are parent CSR-slot lists (own direction) or None,
    trace is (vertices_f, dists_f, vertices_b, dists_b) arrays or None.
    """
    ws.generation += 1
    cur = ws.generation
    dist = ws.dist
    rankl = ws.rankl
    stall = ws.stall
    parent = ws.parent
    gen = ws.gen
    sgen = ws.sgen
    indptr, target, weight, rank = eh.indptr, eh.target, eh.weight, eh.rank
    if check_single_relax:
        if ws.egen is None or len(ws.egen[0]) < len(target[0]) or len(ws.egen[1]) < len(target[1]):
            ws.egen = ([0] * len(target[0]), [0] * len(target[1]))
        ws.estamp += 1

    for side, root in ((0, s), (1, t)):
        dist[side][root] = 0
        rankl[side][root] = 0
        parent[side][root] = -1
        gen[side][root] = cur
    heaps: tuple[list, list] = ([(0, 0, s)], [(0, 0, t)])
    best = INF
    meet = -1
    if s == t:
        best = 0
        meet = s
    settled = 0
    relaxed = 0
    stall_checks = 0
    trace_v: tuple[list[int], list[int]] = ([], [])
    trace_d: tuple[list[int], list[int]] = ([], [])

    while True:
        fh, bh = heaps
        active_f = bool(fh) and fh[0][0] < best
        active_b = bool(bh) and bh[0][0] < best
        if not active_f and not active_b:
            break
        side = 0 if active_f and (not active_b or fh[0][0] <= bh[0][0]) else 1
        heap = heaps[side]
        other = 1 - side
        d, r, u = heapq.heappop(heap)
        dist_s = dist[side]
        gen_s = gen[side]
        if gen_s[u] != cur or d != dist_s[u] or r != rankl[side][u]:
            continue

        # stall tests examine the opposite-direction adjacency of u
        if policy == POLICY_ON_DEMAND or policy == POLICY_PARTIAL:
            o_indptr = indptr[other]
            o_target = target[other]
            o_weight = weight[other]
            lo, hi = o_indptr[u], o_indptr[u + 1]
            if policy == POLICY_PARTIAL:
                hi = lo + stall_prefix_len(frac, hi - lo)
            stalled = False
            for slot in range(lo, hi):
                stall_checks += 1
                x = o_target[slot]
                if gen_s[x] == cur and dist_s[x] + o_weight[slot] < d:
                    stalled = True
                    break
            if stalled:
                continue
        elif policy == POLICY_IN_ADVANCE:
            if sgen[side][u] == cur and stall[side][u] < d:
                continue

        settled += 1
        if want_trace:
            trace_v[side].append(u)
            trace_d[side].append(d)

        ru = rankl[side][u]
        s_indptr = indptr[side]
        s_target = target[side]
        s_weight = weight[side]
        s_rank = rank[side]
        rank_s = rankl[side]
        par_s = parent[side]
        gen_o = gen[other]
        dist_o = dist[other]
        lo, hi = s_indptr[u], s_indptr[u + 1]
        for slot in range(lo, hi):
            er = s_rank[slot]
            if er < ru:
                # adjacency is rank-descending: the rest is infeasible
                if policy == POLICY_IN_ADVANCE:
                    st = stall[side]
                    stg = sgen[side]
                    for slot2 in range(slot, hi):
                        stall_checks += 1
                        if check_single_relax:
                            if ws.egen[side][slot2] == ws.estamp:
                                raise AssertionError(
                                    f"edge slot {slot2} touched twice (side {side})"
                                )
                            ws.egen[side][slot2] = ws.estamp
                        v = s_target[slot2]
                        nd = d + s_weight[slot2]
                        if stg[v] != cur or nd < st[v]:
                            st[v] = nd
                            stg[v] = cur
                break
            relaxed += 1
            if check_single_relax:
                if ws.egen[side][slot] == ws.estamp:
                    raise AssertionError(f"edge slot {slot} relaxed twice (side {side})")
                ws.egen[side][slot] = ws.estamp
            v = s_target[slot]
            nd = d + s_weight[slot]
            if gen_s[v] != cur:
                dist_s[v] = nd
                rank_s[v] = er
                par_s[v] = slot
                gen_s[v] = cur
                heapq.heappush(heap, (nd, er, v))
                if gen_o[v] == cur and nd + dist_o[v] < best:
                    best = nd + dist_o[v]
                    meet = v
            elif nd < dist_s[v]:
                dist_s[v] = nd
                rank_s[v] = er
                par_s[v] = slot
                heapq.heappush(heap, (nd, er, v))
                if gen_o[v] == cur and nd + dist_o[v] < best:
                    best = nd + dist_o[v]
                    meet = v
            elif nd == dist_s[v] and er < rank_s[v]:
                # lower rank label on a distance tie widens later pruning;
                # the parent follows so extracted paths stay up-down
                rank_s[v] = er
                par_s[v] = slot
                heapq.heappush(heap, (nd, er, v))

    fpar = parent[0] if want_parents else None
    bpar = parent[1] if want_parents else None
    trace = None
    if want_trace:
        trace = (
            np.array(trace_v[0], dtype=np.int64),
            np.array(trace_d[0], dtype=np.int64),
            np.array(trace_v[1], dtype=np.int64),
            np.array(trace_d[1], dtype=np.int64),
        )
    return best, meet, settled, relaxed, stall_checks, fpar, bpar, trace


def ch_query(ch: ChView, ws: ChWorkspace, s: int, t: int, use_stall: bool,
             want_trace: bool = False):
    """Bidirectional upward search over a contraction order.

    Same loop shape, termination, and counters as eh_query, minus rank
    labels; stalling is the on-demand check over the stored downward
    adjacency (which is the opposite direction's upward arrays).
    """
    ws.generation += 1
    cur = ws.generation
    dist = ws.dist
    gen = ws.gen
    indptr, target, weight = ch.indptr, ch.target, ch.weight
    dist[0][s] = 0
    gen[0][s] = cur
    dist[1][t] = 0
    gen[1][t] = cur
    heaps: tuple[list, list] = ([(0, s)], [(0, t)])
    best = INF
    meet = -1
    if s == t:
        best = 0
        meet = s
    settled = 0
    relaxed = 0
    stall_checks = 0
    trace_v: tuple[list[int], list[int]] = ([], [])
    trace_d: tuple[list[int], list[int]] = ([], [])
    while True:
        fh, bh = heaps
        active_f = bool(fh) and fh[0][0] < best
        active_b = bool(bh) and bh[0][0] < best
        if not active_f and not active_b:
            break
        side = 0 if active_f and (not active_b or fh[0][0] <= bh[0][0]) else 1
        other = 1 - side
        d, u = heapq.heappop(heaps[side])
        dist_s = dist[side]
        gen_s = gen[side]
        if gen_s[u] != cur or d != dist_s[u]:
            continue
        if use_stall:
            o_indptr = indptr[other]
            o_target = target[other]
            o_weight = weight[other]
            stalled = False
            for slot in range(o_indptr[u], o_indptr[u + 1]):
                stall_checks += 1
                x = o_target[slot]
                if gen_s[x] == cur and dist_s[x] + o_weight[slot] < d:
                    stalled = True
                    break
            if stalled:
                continue
        settled += 1
        if want_trace:
            trace_v[side].append(u)
            trace_d[side].append(d)
        s_indptr = indptr[side]
        s_target = target[side]
        s_weight = weight[side]
        gen_o = gen[other]
        dist_o = dist[other]
        heap = heaps[side]
        for slot in range(s_indptr[u], s_indptr[u + 1]):
            relaxed += 1
            v = s_target[slot]
            nd = d + s_weight[slot]
            if gen_s[v] != cur or nd < dist_s[v]:
                dist_s[v] = nd
                gen_s[v] = cur
                heapq.heappush(heap, (nd, v))
                if gen_o[v] == cur and nd + dist_o[v] < best:
                    best = nd + dist_o[v]
                    meet = v
    trace = None
    if want_trace:
        trace = (
            np.array(trace_v[0], dtype=np.int64),
            np.array(trace_d[0], dtype=np.int64),
            np.array(trace_v[1], dtype=np.int64),
            np.array(trace_d[1], dtype=np.int64),
        )
    return best, meet, settled, relaxed, stall_checks, trace
