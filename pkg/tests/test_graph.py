from __future__ import annotations

import gzip
import io

import numpy as np
import pytest

from ehroute import (
    DimacsFormatError,
    load_gr,
    make_graph,
    parse_dimacs_gr,
    reorder_dfs_preorder,
    save_gr,
    turn_expand,
    write_dimacs_gr,
)
from conftest import random_graph, random_triples
from oracles import dict_dijkstra, floyd_warshall, turn_state_graph


def test_make_graph_normalizes():
    g = make_graph(3, [(0, 1, 5), (0, 1, 3), (1, 1, 2), (2, 0, 4), (0, 1, 9)])
    assert g.vertex_count == 3
    assert g.edge_count == 2  # self-loop dropped, parallels collapsed
    assert g.tail.tolist() == [0, 2]
    assert g.head.tolist() == [1, 0]
    assert g.weight.tolist() == [3, 4]  # minimum weight survives


def test_make_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        make_graph(2, [(0, 2, 1)])
    with pytest.raises(ValueError):
        make_graph(2, [(-1, 0, 1)])
    with pytest.raises(ValueError):
        make_graph(2, [(0, 1, -3)])


def test_csr_shapes():
    g = make_graph(4, [(0, 1, 1), (0, 2, 2), (2, 1, 3), (3, 0, 4)])
    assert g.out_indptr.tolist() == [0, 2, 2, 3, 4]
    assert g.in_indptr.tolist() == [0, 1, 3, 4, 4]
    # in_eids orders edges by (head, tail)
    assert g.tail[g.in_eids].tolist() == [3, 0, 2, 0]


GOLDEN = """c tiny example
p sp 4 5
c arcs follow
a 1 2 10
a 2 3 0
a 3 4 7
a 4 1 2
a 1 3 99
"""


def test_parse_golden():
    g = parse_dimacs_gr(GOLDEN)
    assert g.vertex_count == 4
    assert g.edge_count == 5
    assert g.weight.sum() == 118


def test_parse_errors():
    cases = [
        ("a 1 2 3\np sp 2 1\n", "arc before problem"),
        ("p sp 2 1\np sp 2 1\na 1 2 3\n", "duplicate problem"),
        ("p xx 2 1\na 1 2 3\n", "malformed problem"),
        ("p sp 2 1\na 1 2\n", "malformed arc"),
        ("p sp 2 1\na 1 3 5\n", "out of range"),
        ("p sp 2 1\na 0 2 5\n", "out of range"),
        ("p sp 2 1\na 1 2 -5\n", "negative arc weight"),
        ("p sp 2 2\na 1 2 5\n", "declares 2 arcs, found 1"),
        ("p sp 2 1\nq 1 2 3\n", "unknown record"),
        ("", "missing problem line"),
    ]
    for text, fragment in cases:
        with pytest.raises(DimacsFormatError) as exc:
            parse_dimacs_gr(text)
        assert fragment in str(exc.value), text


def test_parse_reports_line_numbers():
    with pytest.raises(DimacsFormatError, match="line 3"):
        parse_dimacs_gr("c x\np sp 2 1\na 9 1 1\n")


def test_roundtrip_random_graphs():
    for seed in range(6):
        g = random_graph(seed, 17, 0.3)
        buf = io.StringIO()
        write_dimacs_gr(g, buf)
        assert parse_dimacs_gr(buf.getvalue()) == g


def test_gz_roundtrip(tmp_path):
    g = random_graph(3, 12, 0.4)
    plain = tmp_path / "g.gr"
    packed = tmp_path / "g.gr.gz"
    save_gr(g, plain)
    save_gr(g, packed)
    assert load_gr(plain) == g
    assert load_gr(packed) == g
    with gzip.open(packed, "rt") as fh:
        assert fh.read() == plain.read_text()


# ---------------------------------------------------------------------------
# turn expansion


def test_turn_expand_counts():
    # 794830-style bookkeeping at toy scale: one copy per outgoing edge,
    # one sink copy per dead end
    g = make_graph(4, [(0, 1, 1), (0, 2, 1), (1, 0, 1), (2, 3, 1)])
    ex, mapping = turn_expand(g, uturn_cost=100, default_turn_cost=0)
    assert ex.vertex_count == g.edge_count + 1  # vertex 3 is a dead end
    assert mapping.sink_copy.tolist() == [-1, -1, -1, 4]
    # expanded edges: one per (input edge, successor edge) pair plus one
    # per edge into a dead end
    expected_edges = sum(
        1
        for e in range(g.edge_count)
        for _ in range(max(1, g.out_degree(int(g.head[e]))))
    )
    assert ex.edge_count == expected_edges


def test_turn_expand_mapping_contiguous():
    g = random_graph(11, 15, 0.25)
    ex, mapping = turn_expand(g, 7, 3)
    seen = np.zeros(ex.vertex_count, dtype=bool)
    for v in range(g.vertex_count):
        r = mapping.copies_of(v)
        assert len(r) == max(1, g.out_degree(v))
        for c in r:
            assert not seen[c]
            seen[c] = True
    assert seen.all()
    # every copy is either an edge copy or a sink copy
    edge_copies = set(mapping.edge_copy.tolist())
    sink_copies = {c for c in mapping.sink_copy.tolist() if c >= 0}
    assert edge_copies | sink_copies == set(range(ex.vertex_count))
    assert not edge_copies & sink_copies


def test_turn_expand_uturn_hand_example():
    # 0 <-> 1, through 1 and back: pay the u-turn once at 1
    g = make_graph(2, [(0, 1, 5), (1, 0, 3)])
    ex, mapping = turn_expand(g, uturn_cost=100, default_turn_cost=0)
    # states: about-to-traverse (0,1) and (1,0)
    c01 = int(mapping.edge_copy[0])
    c10 = int(mapping.edge_copy[1])
    assert ex.edge_count == 2
    lookup = {(int(ex.tail[e]), int(ex.head[e])): int(ex.weight[e]) for e in range(2)}
    assert lookup[(c01, c10)] == 5 + 100  # arriving at 1, turning back
    assert lookup[(c10, c01)] == 3 + 100


def test_turn_expand_matches_state_oracle():
    for seed in range(8):
        n = 4 + seed
        triples = random_triples(seed + 50, n, 0.3, wmax=20)
        g = make_graph(n, triples)
        canon = list(zip(g.tail.tolist(), g.head.tolist(), g.weight.tolist()))
        uturn, turn = (100, 0) if seed % 2 else (13, 4)
        ex, mapping = turn_expand(g, uturn, turn)
        states, adj = turn_state_graph(n, canon, uturn, turn)

        def to_copy(state):
            kind, i = state
            return int(mapping.edge_copy[i] if kind == "edge" else mapping.sink_copy[i])

        exp_adj = {}
        for e in range(ex.edge_count):
            exp_adj.setdefault(int(ex.tail[e]), []).append(
                (int(ex.head[e]), int(ex.weight[e]))
            )
        for src in states:
            oracle = dict_dijkstra(adj, src)
            got = dict_dijkstra(exp_adj, to_copy(src))
            for dst in states:
                want = oracle.get(dst)
                have = got.get(to_copy(dst))
                assert want == have, (seed, src, dst)


def test_turn_expand_rejects_negative_costs():
    g = make_graph(2, [(0, 1, 1)])
    with pytest.raises(ValueError):
        turn_expand(g, -1, 0)
    with pytest.raises(ValueError):
        turn_expand(g, 0, -1)


# ---------------------------------------------------------------------------
# DFS preorder reordering


def test_reorder_preserves_distances():
    g = random_graph(21, 18, 0.25, wmax=30)
    relabeled, perm = reorder_dfs_preorder(g)
    n = g.vertex_count
    old = floyd_warshall(n, zip(g.tail.tolist(), g.head.tolist(), g.weight.tolist()))
    new = floyd_warshall(
        n, zip(relabeled.tail.tolist(), relabeled.head.tolist(), relabeled.weight.tolist())
    )
    for u in range(n):
        for v in range(n):
            assert old[u, v] == new[perm[u], perm[v]]


def test_reorder_is_dfs_preorder():
    g = make_graph(5, [(0, 2, 1), (0, 1, 1), (2, 3, 1), (1, 3, 1), (4, 0, 1)])
    _, perm = reorder_dfs_preorder(g)
    # preorder from 0 with ascending heads: 0, 1, 3, then 2, restart at 4
    assert perm.tolist() == [0, 1, 3, 2, 4]
