"""Directed graphs with integer weights in CSR form.

Vertices are 0..n-1.  Edges are stored in one canonical order (sorted by
tail, then head) so that two graphs with the same edge set compare equal
array-wise.  Weights are int64; ``INF`` is a sentinel chosen so that any
sum of real path weights stays below it.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

INF = 1 << 62


class DimacsFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    tail: np.ndarray  # int64, sorted by (tail, head)
    head: np.ndarray
    weight: np.ndarray
    # CSR over the canonical edge order: out_indptr[u]:out_indptr[u+1]
    # indexes edges leaving u.  in_eids permutes edges into (head, tail)
    # order for the reverse direction.
    out_indptr: np.ndarray = field(compare=False)
    in_indptr: np.ndarray = field(compare=False)
    in_eids: np.ndarray = field(compare=False)

    @property
    def edge_count(self) -> int:
        return int(self.tail.shape[0])

    def out_range(self, u: int) -> tuple[int, int]:
        return int(self.out_indptr[u]), int(self.out_indptr[u + 1])

    def out_degree(self, u: int) -> int:
        return int(self.out_indptr[u + 1] - self.out_indptr[u])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and np.array_equal(self.tail, other.tail)
            and np.array_equal(self.head, other.head)
            and np.array_equal(self.weight, other.weight)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.vertex_count}, m={self.edge_count})"


def make_graph(
    vertex_count: int,
    edges: Iterable[tuple[int, int, int]],
    *,
    keep_parallel: bool = False,
) -> Graph:
    """Build a Graph from (tail, head, weight) triples.

    Self-loops are dropped.  Parallel edges collapse to the minimum weight
    unless keep_parallel is set (the canonical order then breaks ties by
    weight).  Raises ValueError for out-of-range vertices, negative
    weights, or a total weight that would overflow the INF sentinel.
    """
    triples = list(edges)
    m = len(triples)
    tail = np.empty(m, dtype=np.int64)
    head = np.empty(m, dtype=np.int64)
    weight = np.empty(m, dtype=np.int64)
    for i, (u, v, w) in enumerate(triples):
        tail[i] = u
        head[i] = v
        weight[i] = w
    if m:
        if tail.min(initial=0) < 0 or head.min(initial=0) < 0:
            raise ValueError("negative vertex id")
        if max(tail.max(initial=0), head.max(initial=0)) >= vertex_count:
            raise ValueError("vertex id out of range")
        if weight.min(initial=0) < 0:
            raise ValueError("negative edge weight")
    keep = tail != head
    tail, head, weight = tail[keep], head[keep], weight[keep]
    order = np.lexsort((weight, head, tail))
    tail, head, weight = tail[order], head[order], weight[order]
    if not keep_parallel and tail.shape[0]:
        first = np.ones(tail.shape[0], dtype=bool)
        first[1:] = (tail[1:] != tail[:-1]) | (head[1:] != head[:-1])
        # sorted by weight within a (tail, head) run, so the first copy
        # is the minimum-weight one
        tail, head, weight = tail[first], head[first], weight[first]
    if int(weight.sum(initial=0)) >= INF:
        raise ValueError("total edge weight overflows the distance sentinel")
    return _assemble(vertex_count, tail, head, weight)


def _assemble(n: int, tail: np.ndarray, head: np.ndarray, weight: np.ndarray) -> Graph:
    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(out_indptr, tail + 1, 1)
    np.cumsum(out_indptr, out=out_indptr)
    in_eids = np.lexsort((tail, head)).astype(np.int64)
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(in_indptr, head + 1, 1)
    np.cumsum(in_indptr, out=in_indptr)
    return Graph(n, tail, head, weight, out_indptr, in_indptr, in_eids)


# ---------------------------------------------------------------------------
# DIMACS .gr I/O


def parse_dimacs_gr(source: str | IO[str]) -> Graph:
    """Parse DIMACS shortest-path format: 'c' comments, one 'p sp n m'
    problem line, then m 'a tail head weight' arcs with 1-based ids.

    Normalization (self-loop drop, parallel-arc collapse) happens here,
    so the stored edge count can be below the declared m.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    n = -1
    declared_m = -1
    seen_arcs = 0
    triples: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n >= 0:
                raise DimacsFormatError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "sp":
                raise DimacsFormatError(f"line {lineno}: malformed problem line {line!r}")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsFormatError(f"line {lineno}: malformed problem line {line!r}") from None
            if n < 0 or declared_m < 0:
                raise DimacsFormatError(f"line {lineno}: negative count in problem line")
        elif parts[0] == "a":
            if n < 0:
                raise DimacsFormatError(f"line {lineno}: arc before problem line")
            if len(parts) != 4:
                raise DimacsFormatError(f"line {lineno}: malformed arc line {line!r}")
            try:
                u, v, w = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsFormatError(f"line {lineno}: malformed arc line {line!r}") from None
            if not (1 <= u <= n) or not (1 <= v <= n):
                raise DimacsFormatError(f"line {lineno}: vertex id out of range 1..{n}")
            if w < 0:
                raise DimacsFormatError(f"line {lineno}: negative arc weight {w}")
            seen_arcs += 1
            triples.append((u - 1, v - 1, w))
        else:
            raise DimacsFormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n < 0:
        raise DimacsFormatError("missing problem line")
    if seen_arcs != declared_m:
        raise DimacsFormatError(f"problem line declares {declared_m} arcs, found {seen_arcs}")
    return make_graph(n, triples)


def write_dimacs_gr(graph: Graph, sink: IO[str]) -> None:
    sink.write(f"p sp {graph.vertex_count} {graph.edge_count}\n")
    tail, head, weight = graph.tail, graph.head, graph.weight
    for i in range(graph.edge_count):
        sink.write(f"a {tail[i] + 1} {head[i] + 1} {weight[i]}\n")


def load_gr(path: str | Path) -> Graph:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            return parse_dimacs_gr(fh)
    with open(path) as fh:
        return parse_dimacs_gr(fh)


def save_gr(graph: Graph, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "wt") as fh:
            write_dimacs_gr(graph, fh)
    else:
        with open(path, "w") as fh:
            write_dimacs_gr(graph, fh)


# ---------------------------------------------------------------------------
# Turn-cost expansion


@dataclass(frozen=True)
class TurnExpansionMapping:
    """Maps the input graph onto its turn-expanded copy.

    edge_copy[e] is the expanded vertex representing "is about to traverse
    input edge e".  copy_start[v]:copy_end[v] is the contiguous id range of
    v's copies.  sink_copy[v] is the single copy of an out-degree-0 vertex
    (-1 elsewhere); it only receives edges.
    """

    vertex_count: int
    edge_count: int
    edge_copy: np.ndarray
    copy_start: np.ndarray
    copy_end: np.ndarray
    sink_copy: np.ndarray

    def copies_of(self, v: int) -> range:
        return range(int(self.copy_start[v]), int(self.copy_end[v]))


def turn_expand(
    graph: Graph, uturn_cost: int, default_turn_cost: int
) -> tuple[Graph, TurnExpansionMapping]:
    """Expand a graph so turn costs become edge weights.

    Each vertex becomes one copy per outgoing edge; an input edge (u, v)
    connects u's copy for that edge to each copy of v, weighted
    w(u, v) + turn cost.  The turn cost is uturn_cost when the next edge
    returns to u and default_turn_cost otherwise.  A vertex with no
    outgoing edge gets a single terminal copy so that it stays reachable.
    """
    if uturn_cost < 0 or default_turn_cost < 0:
        raise ValueError("turn costs must be non-negative")
    n, m = graph.vertex_count, graph.edge_count
    edge_copy = np.empty(m, dtype=np.int64)
    copy_start = np.empty(n, dtype=np.int64)
    copy_end = np.empty(n, dtype=np.int64)
    sink_copy = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        lo, hi = graph.out_range(v)
        copy_start[v] = nxt
        if lo == hi:
            sink_copy[v] = nxt
            nxt += 1
        else:
            for e in range(lo, hi):
                edge_copy[e] = nxt
                nxt += 1
        copy_end[v] = nxt
    triples: list[tuple[int, int, int]] = []
    tail, head, weight = graph.tail, graph.head, graph.weight
    for e in range(m):
        u, v, w = int(tail[e]), int(head[e]), int(weight[e])
        src = int(edge_copy[e])
        lo, hi = graph.out_range(v)
        if lo == hi:
            triples.append((src, int(sink_copy[v]), w))
            continue
        for f in range(lo, hi):
            turn = uturn_cost if int(head[f]) == u else default_turn_cost
            triples.append((src, int(edge_copy[f]), w + turn))
    expanded = make_graph(nxt, triples)
    mapping = TurnExpansionMapping(n, m, edge_copy, copy_start, copy_end, sink_copy)
    return expanded, mapping


# ---------------------------------------------------------------------------
# Locality reordering


def dfs_preorder_perm(n: int, out_indptr: np.ndarray, sorted_heads: np.ndarray) -> np.ndarray:
    """perm[old] = new in DFS preorder: neighbors in ascending head order
    (the CSR must be head-sorted per vertex), restarts from the smallest
    unvisited vertex."""
    perm = np.full(n, -1, dtype=np.int64)
    nxt = 0
    indptr = out_indptr.tolist()
    head = sorted_heads.tolist()
    for root in range(n):
        if perm[root] >= 0:
            continue
        stack = [root]
        while stack:
            u = stack.pop()
            if perm[u] >= 0:
                continue
            perm[u] = nxt
            nxt += 1
            lo, hi = indptr[u], indptr[u + 1]
            # reversed so the smallest head is popped first
            for e in range(hi - 1, lo - 1, -1):
                v = head[e]
                if perm[v] < 0:
                    stack.append(v)
    return perm


def reorder_dfs_preorder(graph: Graph) -> tuple[Graph, np.ndarray]:
    """Renumber vertices in DFS preorder over forward adjacency.

    Returns the relabeled graph and the permutation perm[old] = new.
    Distances are preserved up to relabeling.
    """
    n = graph.vertex_count
    perm = dfs_preorder_perm(n, graph.out_indptr, graph.head)
    relabeled = make_graph(
        n,
        zip(
            perm[graph.tail].tolist(),
            perm[graph.head].tolist(),
            graph.weight.tolist(),
        ),
        keep_parallel=True,
    )
    return relabeled, perm
