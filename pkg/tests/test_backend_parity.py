"""Output-for-output parity between the pure and compiled backends.

Every public kernel must produce identical results on identical input:
hierarchy arrays, round logs, distances, counters, traces, and extracted
paths.  Parent workspaces are compared through the paths built from
them, not raw (stale slots legitimately hold junk from earlier queries).
"""

from __future__ import annotations

import numpy as np
import pytest

import ehroute
from ehroute import _backend
from ehroute.bench import grid_graph
from ehroute.ch import CHQuery, build_contraction_hierarchy
from ehroute.hierarchy import StallPolicy
from ehroute.query import EHQuery

from conftest import ALL_BACKENDS, random_graph

pytestmark = pytest.mark.skipif(
    len(ALL_BACKENDS) < 2, reason="compiled backend not built"
)

GRAPH_CASES = [
    random_graph(101, 6, 0.5),
    random_graph(102, 10, 0.3),
    random_graph(103, 14, 0.25),
    random_graph(104, 16, 0.2, wmax=1),
    random_graph(105, 18, 0.35, wmax=3),
    random_graph(106, 20, 0.15),
    random_graph(107, 22, 0.3),
    random_graph(108, 24, 0.2),
    random_graph(109, 12, 0.6, wmax=5),
    random_graph(110, 9, 0.45, wmax=0),
    grid_graph(5, 4, seed=111),
    grid_graph(3, 7, seed=112, wmax=2),
]

POLICIES = [
    StallPolicy("none"),
    StallPolicy("on-demand"),
    StallPolicy("in-advance"),
    StallPolicy("partial", 0.5),
    StallPolicy("partial", 0.0),
    StallPolicy("partial", 1.0),
]

EH_FIELDS = ("tail", "head", "weight", "rank", "via", "perm", "inv_perm",
             "out_indptr", "in_indptr", "bwd_eids")
CH_FIELDS = ("order", "tail", "head", "weight", "via",
             "up_out_indptr", "up_in_indptr", "up_out_eids", "up_in_eids")


def test_edge_hierarchies_identical():
    for g in GRAPH_CASES:
        for oracle in ("ch", "dijkstra"):
            hp = ehroute.build_edge_hierarchy(g, oracle=oracle, backend="pure")
            hc = ehroute.build_edge_hierarchy(g, oracle=oracle, backend="compiled")
            for f in EH_FIELDS:
                assert np.array_equal(getattr(hp, f), getattr(hc, f)), (oracle, f)
            assert hp.round_log == hc.round_log


def test_contraction_hierarchies_identical():
    for g in GRAPH_CASES:
        cp = build_contraction_hierarchy(g, backend="pure")
        cc = build_contraction_hierarchy(g, backend="compiled")
        for f in CH_FIELDS:
            assert np.array_equal(getattr(cp, f), getattr(cc, f)), f


def test_eh_queries_identical():
    for g in GRAPH_CASES[:6]:
        h = ehroute.build_edge_hierarchy(g, backend="pure")
        qp = EHQuery(h, backend="pure")
        qc = EHQuery(h, backend="compiled")
        n = g.vertex_count
        for s in range(n):
            for t in range(n):
                for pol in POLICIES:
                    rp = qp.query(s, t, pol, with_path=True, with_trace=True)
                    rc = qc.query(s, t, pol, with_path=True, with_trace=True)
                    key = (s, t, str(pol))
                    assert rp.distance == rc.distance, key
                    assert rp.meeting_vertex == rc.meeting_vertex, key
                    assert rp.packed_edges == rc.packed_edges, key
                    assert rp.stats.settled == rc.stats.settled, key
                    assert rp.stats.relaxed == rc.stats.relaxed, key
                    assert rp.stats.stall_checks == rc.stats.stall_checks, key
                    assert np.array_equal(
                        rp.trace.forward_vertices, rc.trace.forward_vertices
                    ), key
                    assert np.array_equal(
                        rp.trace.forward_dists, rc.trace.forward_dists
                    ), key
                    assert np.array_equal(
                        rp.trace.backward_vertices, rc.trace.backward_vertices
                    ), key
                    assert np.array_equal(
                        rp.trace.backward_dists, rc.trace.backward_dists
                    ), key
                    if rp.reachable:
                        assert qp.unpack(rp) == qc.unpack(rc), key


def test_single_relax_assertion_holds_compiled():
    for g in GRAPH_CASES[:4]:
        h = ehroute.build_edge_hierarchy(g, backend="compiled")
        q = EHQuery(h, backend="compiled")
        pol = StallPolicy("in-advance")
        for s in range(g.vertex_count):
            for t in range(g.vertex_count):
                q.query(s, t, pol, check_single_relax=True)


def test_ch_queries_identical():
    for g in GRAPH_CASES[:6]:
        ch = build_contraction_hierarchy(g, backend="pure")
        qp = CHQuery(ch, backend="pure")
        qc = CHQuery(ch, backend="compiled")
        n = g.vertex_count
        for s in range(n):
            for t in range(n):
                for stall in (True, False):
                    dp, sp, tp = qp.query(s, t, stall=stall, with_trace=True)
                    dc, sc, tc = qc.query(s, t, stall=stall, with_trace=True)
                    key = (s, t, stall)
                    assert dp == dc, key
                    assert sp.settled == sc.settled, key
                    assert sp.relaxed == sc.relaxed, key
                    assert sp.stall_checks == sc.stall_checks, key
                    for i in range(4):
                        assert np.array_equal(tp[i], tc[i]), key


def test_dijkstra_layer_identical():
    kp = _backend.kernels("pure")
    kc = _backend.kernels("compiled")
    for g in GRAPH_CASES:
        fp = kp.prepare_csr(g.out_indptr, g.head, g.weight)
        fc = kc.prepare_csr(g.out_indptr, g.head, g.weight)
        bt = g.tail[g.in_eids]
        bw = g.weight[g.in_eids]
        bp = kp.prepare_csr(g.in_indptr, bt, bw)
        bc = kc.prepare_csr(g.in_indptr, bt, bw)
        wsp = kp.make_bidi_workspace(g.vertex_count)
        wsc = kc.make_bidi_workspace(g.vertex_count)
        for s in range(g.vertex_count):
            dp, pp, op = kp.dijkstra(fp, s)
            dc, pc, oc = kc.dijkstra(fc, s)
            assert np.array_equal(dp, dc)
            assert np.array_equal(pp, pc)
            assert np.array_equal(op, oc)
        for s in range(g.vertex_count):
            for t in range(g.vertex_count):
                assert kp.bidi_distance(fp, bp, s, t, wsp) == \
                    kc.bidi_distance(fc, bc, s, t, wsc)
                rp = kp.bidi_with_parents(fp, bp, s, t)
                rc = kc.bidi_with_parents(fc, bc, s, t)
                assert rp[0] == rc[0] and rp[1] == rc[1], (s, t)
                assert np.array_equal(rp[2], rc[2]), (s, t)
                assert np.array_equal(rp[3], rc[3]), (s, t)


def test_stall_prefix_len_matches():
    kp = _backend.kernels("pure")
    kc = _backend.kernels("compiled")
    for degree in range(0, 40):
        for num in range(0, 11):
            frac = num / 10
            assert kp.stall_prefix_len(frac, degree) == \
                kc.stall_prefix_len(frac, degree), (frac, degree)


def test_compiled_build_ignores_worker_count():
    g = GRAPH_CASES[2]
    a = ehroute.build_edge_hierarchy(g, backend="compiled", workers=1)
    b = ehroute.build_edge_hierarchy(g, backend="compiled", workers=4)
    for f in EH_FIELDS:
        assert np.array_equal(getattr(a, f), getattr(b, f)), f
    assert a.round_log == b.round_log
