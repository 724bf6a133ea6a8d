from __future__ import annotations

import numpy as np
import pytest

from ehroute import INF, DijkstraEngine, make_graph
from conftest import random_graph


def fw_of(graph):
    from oracles import floyd_warshall

    return floyd_warshall(
        graph.vertex_count,
        zip(graph.tail.tolist(), graph.head.tolist(), graph.weight.tolist()),
    )


CASES = [(s, 20, p) for s in range(4) for p in (0.1, 0.3, 0.6)] + [
    (7, 2, 0.5),
    (8, 40, 0.15),
    (9, 33, 0.05),
]


def test_single_source_matches_floyd_warshall(backend):
    for seed, n, p in CASES:
        g = random_graph(seed, n, p)
        truth = fw_of(g)
        eng = DijkstraEngine(g, backend=backend)
        for s in range(n):
            res = eng.single_source(s)
            got = np.where(res.dist >= INF, np.inf, res.dist.astype(float))
            assert np.array_equal(got, truth[s]), (seed, s)


def test_backward_single_source(backend):
    g = random_graph(5, 25, 0.2)
    truth = fw_of(g)
    eng = DijkstraEngine(g, backend=backend)
    for t in range(g.vertex_count):
        res = eng.single_source(t, backward=True)
        got = np.where(res.dist >= INF, np.inf, res.dist.astype(float))
        assert np.array_equal(got, truth[:, t]), t


def test_bidirectional_distance(backend):
    for seed, n, p in CASES[:8]:
        g = random_graph(seed, n, p)
        truth = fw_of(g)
        eng = DijkstraEngine(g, backend=backend)
        for s in range(n):
            for t in range(n):
                d = eng.distance(s, t)
                want = truth[s, t]
                assert (d >= INF and want == np.inf) or d == want, (seed, s, t)


def test_path_is_real_and_shortest(backend):
    g = random_graph(13, 22, 0.25)
    eng = DijkstraEngine(g, backend=backend)
    truth = fw_of(g)
    edge_set = {
        (int(g.tail[e]), int(g.head[e])): int(g.weight[e]) for e in range(g.edge_count)
    }
    for s in range(0, g.vertex_count, 3):
        for t in range(g.vertex_count):
            dist, path = eng.path(s, t)
            if truth[s, t] == np.inf:
                assert dist >= INF and path == []
                continue
            assert dist == truth[s, t]
            assert path[0] == s and path[-1] == t
            total = 0
            for a, b in zip(path, path[1:]):
                assert (a, b) in edge_set
                total += edge_set[(a, b)]
            assert total == dist


def test_parent_edges_reconstruct_distances(backend):
    g = random_graph(2, 18, 0.3)
    eng = DijkstraEngine(g, backend=backend)
    res = eng.single_source(4)
    for v in range(g.vertex_count):
        e = int(res.parent_edge[v])
        if e < 0:
            continue
        assert int(g.head[e]) == v
        assert res.dist[int(g.tail[e])] + int(g.weight[e]) == res.dist[v]


def test_settle_order_monotone(backend):
    g = random_graph(6, 30, 0.2, wmax=10)
    eng = DijkstraEngine(g, backend=backend)
    for s in (0, 7, 29):
        res = eng.single_source(s)
        order = res.settle_order
        assert order[0] == s
        ds = res.dist[order]
        assert (np.diff(ds) >= 0).all()
        # settled set == reachable set
        assert set(order.tolist()) == {
            v for v in range(g.vertex_count) if res.dist[v] < INF
        }


def test_rank_targets(backend):
    g = random_graph(17, 40, 0.15)
    eng = DijkstraEngine(g, backend=backend)
    res = eng.single_source(3)
    reachable = int((res.dist < INF).sum())
    targets = eng.rank_targets(3, [1, 2, 4, 8, reachable, reachable + 1])
    assert targets[0] == (1, 3)  # the source settles first, at rank 1
    for r, v in targets:
        if r <= reachable:
            assert v == int(res.settle_order[r - 1])
        else:
            assert v is None
    with pytest.raises(ValueError):
        eng.rank_targets(3, [0])


def test_zero_weight_cycles(backend):
    # zero-weight cycle plus exits: distances must stay finite and exact
    g = make_graph(
        4, [(0, 1, 0), (1, 0, 0), (1, 2, 0), (2, 1, 0), (2, 3, 5), (0, 3, 9)]
    )
    eng = DijkstraEngine(g, backend=backend)
    res = eng.single_source(0)
    assert res.dist.tolist() == [0, 0, 0, 5]
    assert eng.distance(0, 3) == 5


def test_vertex_range_checks(backend):
    g = make_graph(2, [(0, 1, 1)])
    eng = DijkstraEngine(g, backend=backend)
    with pytest.raises(ValueError):
        eng.distance(0, 2)
    with pytest.raises(ValueError):
        eng.single_source(-1)
