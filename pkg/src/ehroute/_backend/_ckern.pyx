# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled search and construction kernels.

Function-for-function mirror of the pure backend with identical
deterministic behavior: same heap keys, same tie-breaking, same counter
semantics, same mutation order during construction.  pure.py is the
readable reference; parity tests hold the two backends to identical
output.  Construction is fused into single kernels (eh_build, ch_build)
so the simulate/select/rank loop never crosses the interpreter.
"""

import numpy as np

from cython.operator cimport dereference as deref, preincrement as inc
from libc.math cimport ceil as c_ceil
from libcpp.algorithm cimport sort as c_sort, unique as c_unique
from libcpp.map cimport map as cmap
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map as umap
from libcpp.unordered_set cimport unordered_set as uset
from libcpp.vector cimport vector

ctypedef long long i64
ctypedef pair[i64, i64] ipair
ctypedef pair[i64, ipair] itriple

cdef extern from "<functional>":
    pass

# std::priority_queue with std::greater is a min-heap; entries are
# (distance, vertex) and (distance, (rank label, vertex)).  No heap ever
# holds two equal entries whose order could matter (per-vertex keys
# strictly decrease between pushes), so pop order is the sorted order
# regardless of heap internals.
cdef extern from "<queue>" nogil:
    cdef cppclass minq2 "std::priority_queue<std::pair<long long, long long>, std::vector<std::pair<long long, long long> >, std::greater<std::pair<long long, long long> > >":
        minq2() except +
        bint empty()
        void push(ipair&)
        ipair& top()
        void pop()
    cdef cppclass minq3 "std::priority_queue<std::pair<long long, std::pair<long long, long long> >, std::vector<std::pair<long long, std::pair<long long, long long> > >, std::greater<std::pair<long long, std::pair<long long, long long> > > >":
        minq3() except +
        bint empty()
        void push(itriple&)
        itriple& top()
        void pop()

cdef i64 C_INF = (<i64>1) << 62
cdef i64 C_UNRANKED = -1

INF = 1 << 62

POLICY_NONE = 0
POLICY_ON_DEMAND = 1
POLICY_IN_ADVANCE = 2
POLICY_PARTIAL = 3

cdef int P_ON_DEMAND = 1
cdef int P_IN_ADVANCE = 2
cdef int P_PARTIAL = 3


cdef void _fill(vector[i64] &out, object arr):
    cdef const i64[::1] mv = np.ascontiguousarray(arr, dtype=np.int64)
    cdef Py_ssize_t i, n = mv.shape[0]
    out.resize(n)
    for i in range(n):
        out[i] = mv[i]


cdef object _vec_to_np(vector[i64] &v):
    cdef Py_ssize_t i, n = v.size()
    arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] mv = arr
    for i in range(n):
        mv[i] = v[i]
    return arr


cdef i64 _prefix_len(double frac, i64 degree):
    if degree <= 0:
        return 0
    cdef i64 k = <i64>c_ceil(frac * degree - 1e-9)
    if k < 0:
        return 0
    return degree if k > degree else k


def stall_prefix_len(frac, degree):
    """ceil(frac * degree) with a guard against float representation
    noise; shared definition across backends."""
    return _prefix_len(frac, degree)


# ---------------------------------------------------------------------------
# Prepared adjacency views


cdef class CsrView:
    cdef readonly i64 n
    cdef vector[i64] indptr, target, weight

    def __cinit__(self, indptr, target, weight):
        _fill(self.indptr, indptr)
        _fill(self.target, target)
        _fill(self.weight, weight)
        self.n = <i64>self.indptr.size() - 1


def prepare_csr(indptr, target, weight):
    return CsrView(indptr, target, weight)


cdef class EhView:
    cdef readonly i64 n
    cdef vector[i64] indptr0, target0, weight0, rank0
    cdef vector[i64] indptr1, target1, weight1, rank1

    def __cinit__(self, fi, ft, fw, fr, bi, bt, bw, br):
        _fill(self.indptr0, fi)
        _fill(self.target0, ft)
        _fill(self.weight0, fw)
        _fill(self.rank0, fr)
        _fill(self.indptr1, bi)
        _fill(self.target1, bt)
        _fill(self.weight1, bw)
        _fill(self.rank1, br)
        self.n = <i64>self.indptr0.size() - 1


def prepare_eh(fwd_indptr, fwd_target, fwd_weight, fwd_rank,
               bwd_indptr, bwd_target, bwd_weight, bwd_rank):
    return EhView(fwd_indptr, fwd_target, fwd_weight, fwd_rank,
                  bwd_indptr, bwd_target, bwd_weight, bwd_rank)


cdef class ChView:
    cdef readonly i64 n
    cdef vector[i64] indptr0, target0, weight0
    cdef vector[i64] indptr1, target1, weight1

    def __cinit__(self, fi, ft, fw, bi, bt, bw):
        _fill(self.indptr0, fi)
        _fill(self.target0, ft)
        _fill(self.weight0, fw)
        _fill(self.indptr1, bi)
        _fill(self.target1, bt)
        _fill(self.weight1, bw)
        self.n = <i64>self.indptr0.size() - 1


def prepare_ch(up_out_indptr, up_out_target, up_out_weight,
               up_in_indptr, up_in_target, up_in_weight):
    return ChView(up_out_indptr, up_out_target, up_out_weight,
                  up_in_indptr, up_in_target, up_in_weight)


# ---------------------------------------------------------------------------
# Workspaces


cdef class BidiWorkspace:
    cdef readonly i64 n
    cdef vector[i64] dist0, dist1, gen0, gen1
    cdef i64 generation

    def __cinit__(self, n):
        cdef Py_ssize_t nn = n
        self.n = nn
        self.dist0.resize(nn)
        self.dist1.resize(nn)
        self.gen0.resize(nn)
        self.gen1.resize(nn)
        self.generation = 0


def make_bidi_workspace(n):
    return BidiWorkspace(n)


cdef class EhWorkspace:
    cdef readonly i64 n
    cdef vector[i64] dist0, dist1, rankl0, rankl1, stall0, stall1
    cdef vector[i64] par0, par1, gen0, gen1, sgen0, sgen1
    cdef vector[i64] egen0, egen1
    cdef i64 estamp, generation

    def __cinit__(self, n):
        cdef Py_ssize_t nn = n
        self.n = nn
        self.dist0.resize(nn)
        self.dist1.resize(nn)
        self.rankl0.resize(nn)
        self.rankl1.resize(nn)
        self.stall0.resize(nn)
        self.stall1.resize(nn)
        self.par0.assign(nn, -1)
        self.par1.assign(nn, -1)
        self.gen0.resize(nn)
        self.gen1.resize(nn)
        self.sgen0.resize(nn)
        self.sgen1.resize(nn)
        self.estamp = 0
        self.generation = 0


def make_eh_workspace(n):
    return EhWorkspace(n)


cdef class ChWorkspace:
    cdef readonly i64 n
    cdef vector[i64] dist0, dist1, gen0, gen1
    cdef i64 generation

    def __cinit__(self, n):
        cdef Py_ssize_t nn = n
        self.n = nn
        self.dist0.resize(nn)
        self.dist1.resize(nn)
        self.gen0.resize(nn)
        self.gen1.resize(nn)
        self.generation = 0


def make_ch_workspace(n):
    return ChWorkspace(n)


# ---------------------------------------------------------------------------
# Plain Dijkstra


def dijkstra(CsrView csr, source):
    """Full single-source run.  Returns (dist, parent_slot, order) where
    parent_slot[v] is the CSR slot of the edge that first set v's final
    distance (-1 at the source/unreached) and order lists vertices in
    settle sequence.  Ties settle by vertex id.
    """
    cdef Py_ssize_t n = csr.n
    cdef vector[i64] dist, parent, order
    dist.assign(n, C_INF)
    parent.assign(n, -1)
    cdef minq2 heap
    cdef ipair e
    cdef i64 src = source
    cdef i64 d, u, v, nd, slot, hi
    dist[src] = 0
    heap.push(ipair(0, src))
    while not heap.empty():
        e = heap.top()
        heap.pop()
        d = e.first
        u = e.second
        if d != dist[u]:
            continue
        order.push_back(u)
        slot = csr.indptr[u]
        hi = csr.indptr[u + 1]
        while slot < hi:
            v = csr.target[slot]
            nd = d + csr.weight[slot]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = slot
                heap.push(ipair(nd, v))
            slot += 1
    return _vec_to_np(dist), _vec_to_np(parent), _vec_to_np(order)


def bidi_distance(CsrView fcsr, CsrView bcsr, s, t, BidiWorkspace ws):
    """Bidirectional Dijkstra distance only; workspace reused across calls."""
    cdef i64 si = s, ti = t
    if si == ti:
        return 0
    ws.generation += 1
    cdef i64 cur = ws.generation
    cdef vector[i64]* DIST[2]
    cdef vector[i64]* GEN[2]
    cdef vector[i64]* IND[2]
    cdef vector[i64]* TGT[2]
    cdef vector[i64]* WGT[2]
    DIST[0] = &ws.dist0
    DIST[1] = &ws.dist1
    GEN[0] = &ws.gen0
    GEN[1] = &ws.gen1
    IND[0] = &fcsr.indptr
    IND[1] = &bcsr.indptr
    TGT[0] = &fcsr.target
    TGT[1] = &bcsr.target
    WGT[0] = &fcsr.weight
    WGT[1] = &bcsr.weight
    DIST[0][0][si] = 0
    GEN[0][0][si] = cur
    DIST[1][0][ti] = 0
    GEN[1][0][ti] = cur
    cdef minq2 h0, h1
    cdef minq2* HP[2]
    HP[0] = &h0
    HP[1] = &h1
    h0.push(ipair(0, si))
    h1.push(ipair(0, ti))
    cdef i64 best = C_INF
    cdef bint active_f, active_b
    cdef int side, other
    cdef ipair e
    cdef i64 d, u, v, nd, slot, hi
    cdef vector[i64]* dist_s
    cdef vector[i64]* gen_s
    cdef vector[i64]* dist_o
    cdef vector[i64]* gen_o
    while True:
        active_f = (not h0.empty()) and h0.top().first < best
        active_b = (not h1.empty()) and h1.top().first < best
        if not active_f and not active_b:
            break
        side = 0 if active_f and ((not active_b) or h0.top().first <= h1.top().first) else 1
        other = 1 - side
        e = HP[side].top()
        HP[side].pop()
        d = e.first
        u = e.second
        dist_s = DIST[side]
        gen_s = GEN[side]
        if gen_s[0][u] != cur or d != dist_s[0][u]:
            continue
        dist_o = DIST[other]
        gen_o = GEN[other]
        slot = IND[side][0][u]
        hi = IND[side][0][u + 1]
        while slot < hi:
            v = TGT[side][0][slot]
            nd = d + WGT[side][0][slot]
            if gen_s[0][v] != cur or nd < dist_s[0][v]:
                dist_s[0][v] = nd
                gen_s[0][v] = cur
                HP[side].push(ipair(nd, v))
                if gen_o[0][v] == cur and nd + dist_o[0][v] < best:
                    best = nd + dist_o[0][v]
            slot += 1
    return best


def bidi_with_parents(CsrView fcsr, CsrView bcsr, s, t):
    """Bidirectional Dijkstra returning (dist, meet, fparent, bparent)
    with parent CSR slots for path extraction; allocates per call."""
    cdef i64 si = s, ti = t
    cdef Py_ssize_t n = fcsr.n
    cdef vector[i64] dist_f, dist_b, par_f, par_b
    dist_f.assign(n, C_INF)
    dist_b.assign(n, C_INF)
    par_f.assign(n, -1)
    par_b.assign(n, -1)
    if si == ti:
        return 0, si, _vec_to_np(par_f), _vec_to_np(par_b)
    dist_f[si] = 0
    dist_b[ti] = 0
    cdef minq2 h0, h1
    h0.push(ipair(0, si))
    h1.push(ipair(0, ti))
    cdef i64 best = C_INF
    cdef i64 meet = -1
    cdef bint active_f, active_b
    cdef ipair e
    cdef i64 d, u, v, nd, slot, hi
    while True:
        active_f = (not h0.empty()) and h0.top().first < best
        active_b = (not h1.empty()) and h1.top().first < best
        if not active_f and not active_b:
            break
        if active_f and ((not active_b) or h0.top().first <= h1.top().first):
            e = h0.top()
            h0.pop()
            d = e.first
            u = e.second
            if d != dist_f[u]:
                continue
            slot = fcsr.indptr[u]
            hi = fcsr.indptr[u + 1]
            while slot < hi:
                v = fcsr.target[slot]
                nd = d + fcsr.weight[slot]
                if nd < dist_f[v]:
                    dist_f[v] = nd
                    par_f[v] = slot
                    h0.push(ipair(nd, v))
                    if nd + dist_b[v] < best:
                        best = nd + dist_b[v]
                        meet = v
                slot += 1
        else:
            e = h1.top()
            h1.pop()
            d = e.first
            u = e.second
            if d != dist_b[u]:
                continue
            slot = bcsr.indptr[u]
            hi = bcsr.indptr[u + 1]
            while slot < hi:
                v = bcsr.target[slot]
                nd = d + bcsr.weight[slot]
                if nd < dist_b[v]:
                    dist_b[v] = nd
                    par_b[v] = slot
                    h1.push(ipair(nd, v))
                    if nd + dist_f[v] < best:
                        best = nd + dist_f[v]
                        meet = v
                slot += 1
    return best, meet, _vec_to_np(par_f), _vec_to_np(par_b)


# ---------------------------------------------------------------------------
# Hierarchy query


def eh_query(EhView eh, EhWorkspace ws, s, t, policy, frac,
             want_parents, want_trace, check_single_relax=False):
    """Rank-pruned bidirectional search over a finalized hierarchy; see
    the pure backend for the commented reference.  Returns (dist, meet,
    settled, relaxed, stall_checks, fpar, bpar, trace); fpar/bpar are
    parent-slot arrays or None, trace is four arrays or None."""
    cdef i64 si = s, ti = t
    cdef int pol = policy
    cdef double fr = frac
    cdef bint wp = want_parents
    cdef bint wt = want_trace
    cdef bint chk = check_single_relax
    ws.generation += 1
    cdef i64 cur = ws.generation

    cdef size_t need0 = eh.target0.size()
    cdef size_t need1 = eh.target1.size()
    if chk:
        if ws.egen0.size() < need0 or ws.egen1.size() < need1:
            ws.egen0.assign(need0, 0)
            ws.egen1.assign(need1, 0)
        ws.estamp += 1
    cdef i64 stamp = ws.estamp

    cdef vector[i64]* DIST[2]
    cdef vector[i64]* RANKL[2]
    cdef vector[i64]* STALL[2]
    cdef vector[i64]* PAR[2]
    cdef vector[i64]* GEN[2]
    cdef vector[i64]* SGEN[2]
    cdef vector[i64]* EG[2]
    cdef vector[i64]* IND[2]
    cdef vector[i64]* TGT[2]
    cdef vector[i64]* WGT[2]
    cdef vector[i64]* RNK[2]
    DIST[0] = &ws.dist0
    DIST[1] = &ws.dist1
    RANKL[0] = &ws.rankl0
    RANKL[1] = &ws.rankl1
    STALL[0] = &ws.stall0
    STALL[1] = &ws.stall1
    PAR[0] = &ws.par0
    PAR[1] = &ws.par1
    GEN[0] = &ws.gen0
    GEN[1] = &ws.gen1
    SGEN[0] = &ws.sgen0
    SGEN[1] = &ws.sgen1
    EG[0] = &ws.egen0
    EG[1] = &ws.egen1
    IND[0] = &eh.indptr0
    IND[1] = &eh.indptr1
    TGT[0] = &eh.target0
    TGT[1] = &eh.target1
    WGT[0] = &eh.weight0
    WGT[1] = &eh.weight1
    RNK[0] = &eh.rank0
    RNK[1] = &eh.rank1

    DIST[0][0][si] = 0
    RANKL[0][0][si] = 0
    PAR[0][0][si] = -1
    GEN[0][0][si] = cur
    DIST[1][0][ti] = 0
    RANKL[1][0][ti] = 0
    PAR[1][0][ti] = -1
    GEN[1][0][ti] = cur

    cdef minq3 h0, h1
    cdef minq3* HP[2]
    HP[0] = &h0
    HP[1] = &h1
    h0.push(itriple(0, ipair(0, si)))
    h1.push(itriple(0, ipair(0, ti)))

    cdef i64 best = C_INF
    cdef i64 meet = -1
    if si == ti:
        best = 0
        meet = si
    cdef i64 settled = 0, relaxed = 0, stall_checks = 0
    cdef vector[i64] tv0, td0, tv1, td1
    cdef vector[i64]* TV[2]
    cdef vector[i64]* TD[2]
    TV[0] = &tv0
    TV[1] = &tv1
    TD[0] = &td0
    TD[1] = &td1

    cdef bint active_f, active_b, stalled
    cdef int side, other
    cdef itriple te
    cdef i64 d, r, u, ru, v, nd, er, x, lo, hi, slot, slot2
    cdef vector[i64]* dist_s
    cdef vector[i64]* gen_s
    cdef vector[i64]* dist_o
    cdef vector[i64]* gen_o
    cdef vector[i64]* o_indptr
    cdef vector[i64]* o_target
    cdef vector[i64]* o_weight
    cdef vector[i64]* s_indptr
    cdef vector[i64]* s_target
    cdef vector[i64]* s_weight
    cdef vector[i64]* s_rank
    cdef vector[i64]* rank_s
    cdef vector[i64]* par_s
    cdef vector[i64]* st_v
    cdef vector[i64]* stg
    cdef vector[i64]* eg

    while True:
        active_f = (not h0.empty()) and h0.top().first < best
        active_b = (not h1.empty()) and h1.top().first < best
        if not active_f and not active_b:
            break
        side = 0 if active_f and ((not active_b) or h0.top().first <= h1.top().first) else 1
        other = 1 - side
        te = HP[side].top()
        HP[side].pop()
        d = te.first
        r = te.second.first
        u = te.second.second
        dist_s = DIST[side]
        gen_s = GEN[side]
        if gen_s[0][u] != cur or d != dist_s[0][u] or r != RANKL[side][0][u]:
            continue

        # stall tests examine the opposite-direction adjacency of u
        if pol == P_ON_DEMAND or pol == P_PARTIAL:
            o_indptr = IND[other]
            o_target = TGT[other]
            o_weight = WGT[other]
            lo = o_indptr[0][u]
            hi = o_indptr[0][u + 1]
            if pol == P_PARTIAL:
                hi = lo + _prefix_len(fr, hi - lo)
            stalled = False
            slot = lo
            while slot < hi:
                stall_checks += 1
                x = o_target[0][slot]
                if gen_s[0][x] == cur and dist_s[0][x] + o_weight[0][slot] < d:
                    stalled = True
                    break
                slot += 1
            if stalled:
                continue
        elif pol == P_IN_ADVANCE:
            if SGEN[side][0][u] == cur and STALL[side][0][u] < d:
                continue

        settled += 1
        if wt:
            TV[side].push_back(u)
            TD[side].push_back(d)

        ru = RANKL[side][0][u]
        s_indptr = IND[side]
        s_target = TGT[side]
        s_weight = WGT[side]
        s_rank = RNK[side]
        rank_s = RANKL[side]
        par_s = PAR[side]
        gen_o = GEN[other]
        dist_o = DIST[other]
        lo = s_indptr[0][u]
        hi = s_indptr[0][u + 1]
        slot = lo
        while slot < hi:
            er = s_rank[0][slot]
            if er < ru:
                # adjacency is rank-descending: the rest is infeasible
                if pol == P_IN_ADVANCE:
                    st_v = STALL[side]
                    stg = SGEN[side]
                    eg = EG[side]
                    slot2 = slot
                    while slot2 < hi:
                        stall_checks += 1
                        if chk:
                            if eg[0][slot2] == stamp:
                                raise AssertionError(
                                    f"edge slot {slot2} touched twice (side {side})"
                                )
                            eg[0][slot2] = stamp
                        v = s_target[0][slot2]
                        nd = d + s_weight[0][slot2]
                        if stg[0][v] != cur or nd < st_v[0][v]:
                            st_v[0][v] = nd
                            stg[0][v] = cur
                        slot2 += 1
                break
            relaxed += 1
            if chk:
                eg = EG[side]
                if eg[0][slot] == stamp:
                    raise AssertionError(f"edge slot {slot} relaxed twice (side {side})")
                eg[0][slot] = stamp
            v = s_target[0][slot]
            nd = d + s_weight[0][slot]
            if gen_s[0][v] != cur:
                dist_s[0][v] = nd
                rank_s[0][v] = er
                par_s[0][v] = slot
                gen_s[0][v] = cur
                HP[side].push(itriple(nd, ipair(er, v)))
                if gen_o[0][v] == cur and nd + dist_o[0][v] < best:
                    best = nd + dist_o[0][v]
                    meet = v
            elif nd < dist_s[0][v]:
                dist_s[0][v] = nd
                rank_s[0][v] = er
                par_s[0][v] = slot
                HP[side].push(itriple(nd, ipair(er, v)))
                if gen_o[0][v] == cur and nd + dist_o[0][v] < best:
                    best = nd + dist_o[0][v]
                    meet = v
            elif nd == dist_s[0][v] and er < rank_s[0][v]:
                # lower rank label on a distance tie widens later pruning;
                # the parent follows so extracted paths stay up-down
                rank_s[0][v] = er
                par_s[0][v] = slot
                HP[side].push(itriple(nd, ipair(er, v)))
            slot += 1

    fpar = _vec_to_np(ws.par0) if wp else None
    bpar = _vec_to_np(ws.par1) if wp else None
    trace = None
    if wt:
        trace = (_vec_to_np(tv0), _vec_to_np(td0), _vec_to_np(tv1), _vec_to_np(td1))
    return best, meet, settled, relaxed, stall_checks, fpar, bpar, trace


def ch_query(ChView ch, ChWorkspace ws, s, t, use_stall, want_trace=False):
    """Bidirectional upward search over a contraction order; same loop
    shape, termination, and counters as eh_query minus rank labels."""
    cdef i64 si = s, ti = t
    cdef bint stall_on = use_stall
    cdef bint wt = want_trace
    ws.generation += 1
    cdef i64 cur = ws.generation
    cdef vector[i64]* DIST[2]
    cdef vector[i64]* GEN[2]
    cdef vector[i64]* IND[2]
    cdef vector[i64]* TGT[2]
    cdef vector[i64]* WGT[2]
    DIST[0] = &ws.dist0
    DIST[1] = &ws.dist1
    GEN[0] = &ws.gen0
    GEN[1] = &ws.gen1
    IND[0] = &ch.indptr0
    IND[1] = &ch.indptr1
    TGT[0] = &ch.target0
    TGT[1] = &ch.target1
    WGT[0] = &ch.weight0
    WGT[1] = &ch.weight1
    DIST[0][0][si] = 0
    GEN[0][0][si] = cur
    DIST[1][0][ti] = 0
    GEN[1][0][ti] = cur
    cdef minq2 h0, h1
    cdef minq2* HP[2]
    HP[0] = &h0
    HP[1] = &h1
    h0.push(ipair(0, si))
    h1.push(ipair(0, ti))
    cdef i64 best = C_INF
    cdef i64 meet = -1
    if si == ti:
        best = 0
        meet = si
    cdef i64 settled = 0, relaxed = 0, stall_checks = 0
    cdef vector[i64] tv0, td0, tv1, td1
    cdef vector[i64]* TV[2]
    cdef vector[i64]* TD[2]
    TV[0] = &tv0
    TV[1] = &tv1
    TD[0] = &td0
    TD[1] = &td1
    cdef bint active_f, active_b, stalled
    cdef int side, other
    cdef ipair e
    cdef i64 d, u, v, nd, x, slot, hi
    cdef vector[i64]* dist_s
    cdef vector[i64]* gen_s
    cdef vector[i64]* dist_o
    cdef vector[i64]* gen_o
    while True:
        active_f = (not h0.empty()) and h0.top().first < best
        active_b = (not h1.empty()) and h1.top().first < best
        if not active_f and not active_b:
            break
        side = 0 if active_f and ((not active_b) or h0.top().first <= h1.top().first) else 1
        other = 1 - side
        e = HP[side].top()
        HP[side].pop()
        d = e.first
        u = e.second
        dist_s = DIST[side]
        gen_s = GEN[side]
        if gen_s[0][u] != cur or d != dist_s[0][u]:
            continue
        if stall_on:
            stalled = False
            slot = IND[other][0][u]
            hi = IND[other][0][u + 1]
            while slot < hi:
                stall_checks += 1
                x = TGT[other][0][slot]
                if gen_s[0][x] == cur and dist_s[0][x] + WGT[other][0][slot] < d:
                    stalled = True
                    break
                slot += 1
            if stalled:
                continue
        settled += 1
        if wt:
            TV[side].push_back(u)
            TD[side].push_back(d)
        gen_o = GEN[other]
        dist_o = DIST[other]
        slot = IND[side][0][u]
        hi = IND[side][0][u + 1]
        while slot < hi:
            relaxed += 1
            v = TGT[side][0][slot]
            nd = d + WGT[side][0][slot]
            if gen_s[0][v] != cur or nd < dist_s[0][v]:
                dist_s[0][v] = nd
                gen_s[0][v] = cur
                HP[side].push(ipair(nd, v))
                if gen_o[0][v] == cur and nd + dist_o[0][v] < best:
                    best = nd + dist_o[0][v]
                    meet = v
            slot += 1
    trace = None
    if wt:
        trace = (_vec_to_np(tv0), _vec_to_np(td0), _vec_to_np(tv1), _vec_to_np(td1))
    return best, meet, settled, relaxed, stall_checks, trace


# ---------------------------------------------------------------------------
# Contraction-order hierarchy construction


cdef struct CEntry:
    i64 w
    i64 via
    i64 hops


cdef void _counting_csr(i64 n, vector[i64] &src, vector[i64] &dst, vector[i64] &w,
                        vector[i64] &indptr, vector[i64] &target, vector[i64] &weight):
    indptr.assign(n + 1, 0)
    cdef Py_ssize_t i, m = src.size()
    cdef i64 v, pos
    for i in range(m):
        indptr[src[i] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    target.resize(m)
    weight.resize(m)
    cdef vector[i64] cursor = indptr
    for i in range(m):
        pos = cursor[src[i]]
        cursor[src[i]] += 1
        target[pos] = dst[i]
        weight[pos] = w[i]


cdef class _ChState:
    """Vertex contraction over sorted overlay maps; mirrors the stepwise
    path (same witness budget, priority formula, lazy heap) so both
    backends emit the same hierarchy."""

    cdef i64 n, position, budget, c_diff, c_hops, c_level
    cdef vector[cmap[i64, CEntry]] out_maps, in_maps
    cdef vector[i64] level, order, priority
    cdef vector[int] contracted
    cdef vector[i64] e_tail, e_head, e_w, e_via

    def __cinit__(self, n, tail, head, weight, budget, c_diff, c_hops, c_level):
        cdef Py_ssize_t nn = n
        self.n = nn
        self.budget = budget
        self.c_diff = c_diff
        self.c_hops = c_hops
        self.c_level = c_level
        self.out_maps.resize(nn)
        self.in_maps.resize(nn)
        self.level.resize(nn)
        self.order.assign(nn, -1)
        self.priority.resize(nn)
        self.contracted.resize(nn)
        self.position = 0
        cdef vector[i64] tl, hd, wt
        _fill(tl, tail)
        _fill(hd, head)
        _fill(wt, weight)
        cdef Py_ssize_t e
        cdef CEntry ent
        for e in range(<Py_ssize_t>tl.size()):
            ent.w = wt[e]
            ent.via = -1
            ent.hops = 1
            self.out_maps[tl[e]][hd[e]] = ent
            self.in_maps[hd[e]][tl[e]] = ent

    cdef umap[i64, i64] _witness(self, i64 source, i64 excluded, i64 cap):
        # budgeted Dijkstra skipping the excluded vertex; labels are real
        # path lengths, so using unsettled ones is safe
        cdef umap[i64, i64] dist
        dist[source] = 0
        cdef minq2 heap
        heap.push(ipair(0, source))
        cdef i64 settled = 0
        cdef ipair e
        cdef i64 d, x, y, nd
        cdef cmap[i64, CEntry].iterator it
        cdef umap[i64, i64].iterator fit
        while not heap.empty():
            e = heap.top()
            heap.pop()
            d = e.first
            x = e.second
            if d != dist[x]:
                continue
            if d > cap:
                break
            settled += 1
            it = self.out_maps[x].begin()
            while it != self.out_maps[x].end():
                y = deref(it).first
                nd = d + deref(it).second.w
                inc(it)
                if y == excluded:
                    continue
                fit = dist.find(y)
                if fit == dist.end() or nd < deref(fit).second:
                    dist[y] = nd
                    heap.push(ipair(nd, y))
            if settled >= self.budget:
                break
        return dist

    cdef ipair _scan(self, i64 v, bint apply_):
        # count (and with apply_, insert) the shortcuts contracting v
        # needs; a pair (a, b) counts when no witness path stays within
        # w(a, v) + w(v, b)
        cdef vector[i64] in_keys, out_keys
        cdef vector[CEntry] in_vals, out_vals
        cdef cmap[i64, CEntry].iterator it = self.in_maps[v].begin()
        while it != self.in_maps[v].end():
            in_keys.push_back(deref(it).first)
            in_vals.push_back(deref(it).second)
            inc(it)
        it = self.out_maps[v].begin()
        while it != self.out_maps[v].end():
            out_keys.push_back(deref(it).first)
            out_vals.push_back(deref(it).second)
            inc(it)
        cdef i64 count = 0, hops_total = 0
        cdef Py_ssize_t ia, ib
        cdef i64 a, b, w_in, w_out, hops_in, hops_out, cap, path, lab
        cdef umap[i64, i64] labels
        cdef umap[i64, i64].iterator fit
        cdef cmap[i64, CEntry].iterator mit
        cdef CEntry ent
        for ia in range(<Py_ssize_t>in_keys.size()):
            a = in_keys[ia]
            w_in = in_vals[ia].w
            hops_in = in_vals[ia].hops
            cap = 0
            for ib in range(<Py_ssize_t>out_keys.size()):
                b = out_keys[ib]
                w_out = out_vals[ib].w
                if b != a and w_in + w_out > cap:
                    cap = w_in + w_out
            labels = self._witness(a, v, cap)
            for ib in range(<Py_ssize_t>out_keys.size()):
                b = out_keys[ib]
                if b == a:
                    continue
                w_out = out_vals[ib].w
                hops_out = out_vals[ib].hops
                path = w_in + w_out
                lab = C_INF
                fit = labels.find(b)
                if fit != labels.end():
                    lab = deref(fit).second
                if lab > path:
                    count += 1
                    hops_total += hops_in + hops_out
                    if apply_:
                        mit = self.out_maps[a].find(b)
                        if mit == self.out_maps[a].end() or path < deref(mit).second.w:
                            ent.w = path
                            ent.via = v
                            ent.hops = hops_in + hops_out
                            self.out_maps[a][b] = ent
                            self.in_maps[b][a] = ent
        return ipair(count, hops_total)

    cdef i64 _priority(self, i64 v):
        cdef ipair ch = self._scan(v, False)
        cdef i64 removed = <i64>self.in_maps[v].size() + <i64>self.out_maps[v].size()
        return (self.c_diff * (ch.first - removed)
                + self.c_hops * ch.second
                + self.c_level * self.level[v])

    cdef void _contract(self, i64 v, vector[i64] &neighbors):
        self._scan(v, True)
        neighbors.clear()
        cdef cmap[i64, CEntry].iterator it = self.in_maps[v].begin()
        while it != self.in_maps[v].end():
            self.e_tail.push_back(deref(it).first)
            self.e_head.push_back(v)
            self.e_w.push_back(deref(it).second.w)
            self.e_via.push_back(deref(it).second.via)
            neighbors.push_back(deref(it).first)
            inc(it)
        it = self.out_maps[v].begin()
        while it != self.out_maps[v].end():
            self.e_tail.push_back(v)
            self.e_head.push_back(deref(it).first)
            self.e_w.push_back(deref(it).second.w)
            self.e_via.push_back(deref(it).second.via)
            neighbors.push_back(deref(it).first)
            inc(it)
        c_sort(neighbors.begin(), neighbors.end())
        neighbors.erase(c_unique(neighbors.begin(), neighbors.end()), neighbors.end())
        cdef Py_ssize_t i
        cdef i64 x
        for i in range(<Py_ssize_t>neighbors.size()):
            x = neighbors[i]
            self.out_maps[x].erase(v)
            self.in_maps[x].erase(v)
        self.out_maps[v].clear()
        self.in_maps[v].clear()
        self.order[v] = self.position
        self.position += 1
        self.contracted[v] = 1
        for i in range(<Py_ssize_t>neighbors.size()):
            x = neighbors[i]
            if self.level[v] + 1 > self.level[x]:
                self.level[x] = self.level[v] + 1

    cdef void _build(self) except *:
        cdef minq2 heap
        cdef i64 v, p, x
        cdef Py_ssize_t i
        for v in range(self.n):
            self.priority[v] = self._priority(v)
            heap.push(ipair(self.priority[v], v))
        cdef ipair e
        cdef vector[i64] neighbors
        while self.position < self.n:
            if heap.empty():
                raise RuntimeError("contraction heap exhausted early")
            e = heap.top()
            heap.pop()
            p = e.first
            v = e.second
            if self.contracted[v] or p != self.priority[v]:
                continue
            # neighbors' overlays and levels change under contraction;
            # refresh their priorities eagerly
            self._contract(v, neighbors)
            for i in range(<Py_ssize_t>neighbors.size()):
                x = neighbors[i]
                self.priority[x] = self._priority(x)
                heap.push(ipair(self.priority[x], x))


def ch_build(n, tail, head, weight, witness_budget, c_diff, c_hops, c_level):
    """Contract all vertices; returns (order, tail, head, weight, via)
    ready for finalization."""
    cdef _ChState st = _ChState(n, tail, head, weight,
                                witness_budget, c_diff, c_hops, c_level)
    st._build()
    return (_vec_to_np(st.order), _vec_to_np(st.e_tail), _vec_to_np(st.e_head),
            _vec_to_np(st.e_w), _vec_to_np(st.e_via))


# ---------------------------------------------------------------------------
# Bipartite matching / vertex cover on (left id, right id) pairs


cdef void _canon_instance(vector[ipair] &pairs, vector[i64] &lefts, vector[i64] &rights,
                          vector[vector[i64]] &adj):
    # canonicalize: dedupe, sides sorted, adjacency rows sorted by
    # side-local index, so the cover is a pure function of the edge set
    lefts.clear()
    rights.clear()
    adj.clear()
    if pairs.empty():
        return
    cdef vector[ipair] ps = pairs
    c_sort(ps.begin(), ps.end())
    ps.erase(c_unique(ps.begin(), ps.end()), ps.end())
    cdef Py_ssize_t i
    cdef vector[i64] rs
    for i in range(<Py_ssize_t>ps.size()):
        rs.push_back(ps[i].second)
    c_sort(rs.begin(), rs.end())
    rs.erase(c_unique(rs.begin(), rs.end()), rs.end())
    rights = rs
    cdef umap[i64, i64] ridx
    for i in range(<Py_ssize_t>rights.size()):
        ridx[rights[i]] = i
    cdef bint have_prev = False
    cdef i64 prev = 0
    for i in range(<Py_ssize_t>ps.size()):
        if not have_prev or ps[i].first != prev:
            lefts.push_back(ps[i].first)
            adj.resize(adj.size() + 1)
            prev = ps[i].first
            have_prev = True
        adj[adj.size() - 1].push_back(ridx[ps[i].second])


cdef bint _try_augment(vector[vector[i64]] &adj, vector[i64] &match_r,
                       vector[i64] &match_l, i64 li, vector[int] &seen):
    cdef Py_ssize_t k
    cdef i64 ri
    for k in range(<Py_ssize_t>adj[li].size()):
        ri = adj[li][k]
        if seen[ri]:
            continue
        seen[ri] = 1
        if match_r[ri] < 0 or _try_augment(adj, match_r, match_l, match_r[ri], seen):
            match_r[ri] = li
            match_l[li] = ri
            return True
    return False


cdef i64 _match_count(vector[vector[i64]] &adj, Py_ssize_t nl, Py_ssize_t nr,
                      vector[i64] &match_r, vector[i64] &match_l):
    match_r.assign(nr, -1)
    match_l.assign(nl, -1)
    cdef vector[int] seen
    cdef Py_ssize_t li
    cdef i64 cnt = 0
    for li in range(nl):
        seen.assign(nr, 0)
        _try_augment(adj, match_r, match_l, li, seen)
    for li in range(nr):
        if match_r[li] >= 0:
            cnt += 1
    return cnt


cdef void _min_cover(vector[vector[i64]] &adj, vector[i64] &lefts, vector[i64] &rights,
                     vector[i64] &cover_l, vector[i64] &cover_r):
    # alternating reachability from unmatched lefts; the cover is
    # (L minus Z) plus (R intersect Z), size equal to the matching
    cover_l.clear()
    cover_r.clear()
    cdef Py_ssize_t nl = lefts.size(), nr = rights.size()
    cdef vector[i64] match_r, match_l
    _match_count(adj, nl, nr, match_r, match_l)
    cdef vector[int] in_z_l, in_z_r
    in_z_l.assign(nl, 0)
    in_z_r.assign(nr, 0)
    cdef vector[i64] stack
    cdef Py_ssize_t li, k
    for li in range(nl):
        if match_l[li] < 0:
            in_z_l[li] = 1
            stack.push_back(li)
    cdef i64 cl, ri, li2
    while not stack.empty():
        cl = stack.back()
        stack.pop_back()
        for k in range(<Py_ssize_t>adj[cl].size()):
            ri = adj[cl][k]
            if in_z_r[ri]:
                continue
            if match_l[cl] == ri:
                continue  # only non-matching edges go left-to-right
            in_z_r[ri] = 1
            li2 = match_r[ri]
            if li2 >= 0 and not in_z_l[li2]:
                in_z_l[li2] = 1
                stack.push_back(li2)
    for li in range(nl):
        if not in_z_l[li]:
            cover_l.push_back(lefts[li])
    for li in range(nr):
        if in_z_r[li]:
            cover_r.push_back(rights[li])


# ---------------------------------------------------------------------------
# Edge-rank hierarchy construction


cdef class _EhConstr:
    """Round-based edge ranking fused into one kernel: simulate shortcut
    counts, select local minima, rank in ascending edge id, bypassing
    pairs via reuse or a minimum vertex cover of new shortcuts.  The
    distance oracle is built once on the input graph and stays exact
    because shortcut weights equal true distances."""

    cdef i64 n, next_rank, unranked_count
    cdef int okind  # 0: bidirectional Dijkstra on the input, 1: upward search
    cdef vector[i64] tail, head, weight, rank, via
    cdef vector[vector[i64]] out_edges, in_edges
    cdef umap[i64, i64] edge_map  # key tail * n + head
    # per-collect scratch
    cdef vector[ipair] c_pairs
    cdef umap[i64, i64] c_lw, c_rw
    cdef vector[i64] c_reuse_eid, c_reuse_w, c_reuse_via
    # oracle adjacency and generation-stamped workspace
    cdef vector[i64] oa_indptr, oa_target, oa_weight
    cdef vector[i64] ob_indptr, ob_target, ob_weight
    cdef vector[i64] od0, od1, og0, og1
    cdef i64 o_generation

    def __cinit__(self, n, tail, head, weight, okind, budget, c_diff, c_hops, c_level):
        cdef Py_ssize_t nn = n
        self.n = nn
        self.okind = okind
        _fill(self.tail, tail)
        _fill(self.head, head)
        _fill(self.weight, weight)
        cdef Py_ssize_t e, m = self.tail.size()
        self.rank.assign(m, C_UNRANKED)
        self.via.assign(m, -1)
        self.out_edges.resize(nn)
        self.in_edges.resize(nn)
        for e in range(m):
            self.out_edges[self.tail[e]].push_back(e)
            self.in_edges[self.head[e]].push_back(e)
            self.edge_map[self.tail[e] * self.n + self.head[e]] = e
        self.next_rank = 0
        self.unranked_count = m
        self.od0.resize(nn)
        self.od1.resize(nn)
        self.og0.resize(nn)
        self.og1.resize(nn)
        self.o_generation = 0
        cdef _ChState st
        cdef vector[i64] s0, t0, w0, s1, t1, w1
        cdef Py_ssize_t i
        cdef i64 a, b
        if self.okind == 1:
            st = _ChState(n, tail, head, weight, budget, c_diff, c_hops, c_level)
            st._build()
            for i in range(<Py_ssize_t>st.e_tail.size()):
                a = st.e_tail[i]
                b = st.e_head[i]
                if st.order[b] > st.order[a]:
                    s0.push_back(a)
                    t0.push_back(b)
                    w0.push_back(st.e_w[i])
                else:
                    s1.push_back(b)
                    t1.push_back(a)
                    w1.push_back(st.e_w[i])
            _counting_csr(self.n, s0, t0, w0, self.oa_indptr, self.oa_target, self.oa_weight)
            _counting_csr(self.n, s1, t1, w1, self.ob_indptr, self.ob_target, self.ob_weight)
        else:
            _counting_csr(self.n, self.tail, self.head, self.weight,
                          self.oa_indptr, self.oa_target, self.oa_weight)
            _counting_csr(self.n, self.head, self.tail, self.weight,
                          self.ob_indptr, self.ob_target, self.ob_weight)

    cdef i64 _odist(self, i64 s, i64 t):
        # exact point-to-point distance; upward search stalls on demand,
        # the plain bidirectional variant does not
        if s == t:
            return 0
        self.o_generation += 1
        cdef i64 cur = self.o_generation
        cdef vector[i64]* DIST[2]
        cdef vector[i64]* GEN[2]
        cdef vector[i64]* IND[2]
        cdef vector[i64]* TGT[2]
        cdef vector[i64]* WGT[2]
        DIST[0] = &self.od0
        DIST[1] = &self.od1
        GEN[0] = &self.og0
        GEN[1] = &self.og1
        IND[0] = &self.oa_indptr
        IND[1] = &self.ob_indptr
        TGT[0] = &self.oa_target
        TGT[1] = &self.ob_target
        WGT[0] = &self.oa_weight
        WGT[1] = &self.ob_weight
        DIST[0][0][s] = 0
        GEN[0][0][s] = cur
        DIST[1][0][t] = 0
        GEN[1][0][t] = cur
        cdef minq2 h0, h1
        cdef minq2* HP[2]
        HP[0] = &h0
        HP[1] = &h1
        h0.push(ipair(0, s))
        h1.push(ipair(0, t))
        cdef bint use_stall = self.okind == 1
        cdef i64 best = C_INF
        cdef bint active_f, active_b, stalled
        cdef int side, other
        cdef ipair e
        cdef i64 d, u, v, nd, x, slot, hi
        cdef vector[i64]* dist_s
        cdef vector[i64]* gen_s
        cdef vector[i64]* dist_o
        cdef vector[i64]* gen_o
        while True:
            active_f = (not h0.empty()) and h0.top().first < best
            active_b = (not h1.empty()) and h1.top().first < best
            if not active_f and not active_b:
                break
            side = 0 if active_f and ((not active_b) or h0.top().first <= h1.top().first) else 1
            other = 1 - side
            e = HP[side].top()
            HP[side].pop()
            d = e.first
            u = e.second
            dist_s = DIST[side]
            gen_s = GEN[side]
            if gen_s[0][u] != cur or d != dist_s[0][u]:
                continue
            if use_stall:
                stalled = False
                slot = IND[other][0][u]
                hi = IND[other][0][u + 1]
                while slot < hi:
                    x = TGT[other][0][slot]
                    if gen_s[0][x] == cur and dist_s[0][x] + WGT[other][0][slot] < d:
                        stalled = True
                        break
                    slot += 1
                if stalled:
                    continue
            dist_o = DIST[other]
            gen_o = GEN[other]
            slot = IND[side][0][u]
            hi = IND[side][0][u + 1]
            while slot < hi:
                v = TGT[side][0][slot]
                nd = d + WGT[side][0][slot]
                if gen_s[0][v] != cur or nd < dist_s[0][v]:
                    dist_s[0][v] = nd
                    gen_s[0][v] = cur
                    HP[side].push(ipair(nd, v))
                    if gen_o[0][v] == cur and nd + dist_o[0][v] < best:
                        best = nd + dist_o[0][v]
                slot += 1
        return best

    cdef void _collect(self, i64 e):
        # read-only scan of the pairs around edge e on the current graph
        self.c_pairs.clear()
        self.c_lw.clear()
        self.c_rw.clear()
        self.c_reuse_eid.clear()
        self.c_reuse_w.clear()
        self.c_reuse_via.clear()
        cdef i64 u = self.tail[e], v = self.head[e], w_e = self.weight[e]
        cdef Py_ssize_t ii, jj
        cdef i64 ein, eout, u2, v2, w_in, w_out, key, eid
        cdef uset[i64] reuse_seen
        cdef umap[i64, i64].iterator fit
        for ii in range(<Py_ssize_t>self.in_edges[u].size()):
            ein = self.in_edges[u][ii]
            if self.rank[ein] != C_UNRANKED:
                continue
            u2 = self.tail[ein]
            if u2 == v:
                continue  # bypass (u2, v) would be a self-loop
            w_in = self.weight[ein]
            for jj in range(<Py_ssize_t>self.out_edges[v].size()):
                eout = self.out_edges[v][jj]
                if self.rank[eout] != C_UNRANKED:
                    continue
                v2 = self.head[eout]
                if v2 == u or v2 == u2:
                    continue  # self-loop bypass / trivial pair
                w_out = self.weight[eout]
                if self._odist(u2, v2) != w_in + w_e + w_out:
                    continue
                key = u2 * self.n + v
                fit = self.edge_map.find(key)
                if fit != self.edge_map.end():
                    eid = deref(fit).second
                    if reuse_seen.count(eid) == 0:
                        reuse_seen.insert(eid)
                        self.c_reuse_eid.push_back(eid)
                        self.c_reuse_w.push_back(w_in + w_e)
                        self.c_reuse_via.push_back(u)
                    continue
                key = u * self.n + v2
                fit = self.edge_map.find(key)
                if fit != self.edge_map.end():
                    eid = deref(fit).second
                    if reuse_seen.count(eid) == 0:
                        reuse_seen.insert(eid)
                        self.c_reuse_eid.push_back(eid)
                        self.c_reuse_w.push_back(w_e + w_out)
                        self.c_reuse_via.push_back(v)
                    continue
                self.c_pairs.push_back(ipair(u2, v2))
                self.c_lw[u2] = w_in + w_e
                self.c_rw[v2] = w_e + w_out

    cdef i64 _count_for_edge(self, i64 e):
        # shortcuts ranking e right now would insert: the minimum vertex
        # cover size of the pair instance (reuse adjustments don't count)
        self._collect(e)
        if self.c_pairs.empty():
            return 0
        cdef vector[i64] lefts, rights, match_r, match_l
        cdef vector[vector[i64]] adj
        _canon_instance(self.c_pairs, lefts, rights, adj)
        return _match_count(adj, lefts.size(), rights.size(), match_r, match_l)

    cdef void _select(self, vector[i64] &selected):
        # counts are frozen at round start; an edge survives when no
        # incident unranked edge has a strictly smaller count
        selected.clear()
        cdef Py_ssize_t i, k, m = self.tail.size()
        cdef vector[i64] unranked
        cdef i64 e, e2, u, v, c
        for e in range(<i64>m):
            if self.rank[e] == C_UNRANKED:
                unranked.push_back(e)
        cdef vector[i64] counts
        counts.assign(m, 0)
        for i in range(<Py_ssize_t>unranked.size()):
            e = unranked[i]
            counts[e] = self._count_for_edge(e)
        cdef bint ok
        cdef int phase
        cdef vector[i64]* lst
        for i in range(<Py_ssize_t>unranked.size()):
            e = unranked[i]
            u = self.tail[e]
            v = self.head[e]
            c = counts[e]
            ok = True
            for phase in range(4):
                if phase == 0:
                    lst = &self.out_edges[u]
                elif phase == 1:
                    lst = &self.in_edges[u]
                elif phase == 2:
                    lst = &self.out_edges[v]
                else:
                    lst = &self.in_edges[v]
                for k in range(<Py_ssize_t>lst[0].size()):
                    e2 = lst[0][k]
                    if e2 != e and self.rank[e2] == C_UNRANKED and counts[e2] < c:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                selected.push_back(e)

    cdef void _insert(self, i64 u, i64 v, i64 w, i64 via_v) except *:
        cdef i64 key = u * self.n + v
        if u == v or self.edge_map.count(key) != 0:
            raise AssertionError("shortcut insert precondition violated")
        cdef i64 eid = <i64>self.tail.size()
        self.tail.push_back(u)
        self.head.push_back(v)
        self.weight.push_back(w)
        self.rank.push_back(C_UNRANKED)
        self.via.push_back(via_v)
        self.out_edges[u].push_back(eid)
        self.in_edges[v].push_back(eid)
        self.edge_map[key] = eid
        self.unranked_count += 1

    cdef void _rank_edge(self, i64 e) except *:
        if self.rank[e] != C_UNRANKED:
            raise ValueError(f"edge {e} is already ranked")
        self._collect(e)
        cdef vector[i64] lefts, rights, cover_l, cover_r
        cdef vector[vector[i64]] adj
        _canon_instance(self.c_pairs, lefts, rights, adj)
        _min_cover(adj, lefts, rights, cover_l, cover_r)
        cdef i64 u = self.tail[e], v = self.head[e]
        cdef Py_ssize_t i
        cdef i64 eid, new_w, old_w, via_v
        # reuses first: weight lowered to the exact bypass distance, via
        # rewritten only on a strict decrease, rank cleared
        for i in range(<Py_ssize_t>self.c_reuse_eid.size()):
            eid = self.c_reuse_eid[i]
            new_w = self.c_reuse_w[i]
            via_v = self.c_reuse_via[i]
            old_w = self.weight[eid]
            if new_w > old_w:
                raise AssertionError(
                    f"reuse of edge {eid} would raise its weight {old_w} -> {new_w}"
                )
            if new_w < old_w:
                self.weight[eid] = new_w
                self.via[eid] = via_v
            if self.rank[eid] != C_UNRANKED:
                self.rank[eid] = C_UNRANKED
                self.unranked_count += 1
        cdef umap[i64, i64].iterator fit
        for i in range(<Py_ssize_t>cover_l.size()):
            fit = self.c_lw.find(cover_l[i])
            self._insert(cover_l[i], v, deref(fit).second, u)
        for i in range(<Py_ssize_t>cover_r.size()):
            fit = self.c_rw.find(cover_r[i])
            self._insert(u, cover_r[i], deref(fit).second, v)
        self.rank[e] = self.next_rank
        self.next_rank += 1
        self.unranked_count -= 1

    def _run(self):
        cdef vector[i64] lr, ls, lu, selected
        cdef i64 rounds = 0, events = 0
        cdef i64 cap = 50 * (<i64>self.tail.size() + self.n) + 10000
        cdef Py_ssize_t i
        while self.unranked_count:
            self._select(selected)
            if selected.empty():
                raise RuntimeError("round selected no edges; selection rule violated")
            lr.push_back(rounds)
            ls.push_back(<i64>selected.size())
            lu.push_back(self.unranked_count)
            for i in range(<Py_ssize_t>selected.size()):
                self._rank_edge(selected[i])
                events += 1
                if events > cap:
                    raise RuntimeError("construction exceeded its rank-event budget")
            rounds += 1
        log = np.empty((lr.size(), 3), dtype=np.int64)
        cdef i64[:, ::1] lv = log
        for i in range(<Py_ssize_t>lr.size()):
            lv[i, 0] = lr[i]
            lv[i, 1] = ls[i]
            lv[i, 2] = lu[i]
        return log


def eh_build(n, tail, head, weight, oracle_kind, witness_budget,
             c_diff, c_hops, c_level, workers):
    """Rank every edge; returns (tail, head, weight, rank, via, log)
    with the round log as an (rounds, 3) array of (round, selected,
    unranked-at-start) rows.  workers is accepted for interface parity;
    the fused kernel runs serially."""
    cdef _EhConstr c = _EhConstr(n, tail, head, weight, oracle_kind,
                                 witness_budget, c_diff, c_hops, c_level)
    log = c._run()
    return (_vec_to_np(c.tail), _vec_to_np(c.head), _vec_to_np(c.weight),
            _vec_to_np(c.rank), _vec_to_np(c.via), log)
