"""Exact shortest-path oracles on plain graphs.

DijkstraEngine prepares both adjacency directions once and then answers
single-source runs, point-to-point distances (bidirectional), and
settle-rank queries.  It is the reference everything else is tested
against, and one of the two distance oracles construction can use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .graph import INF, Graph


@dataclass(frozen=True)
class SearchResult:
    dist: np.ndarray  # int64, INF where unreachable
    parent_edge: np.ndarray  # edge id that set the final distance, -1 at source/unreached
    settle_order: np.ndarray  # vertices in settle sequence; source first


class DijkstraEngine:
    def __init__(self, graph: Graph, backend: str | None = None):
        self.graph = graph
        self.backend = _backend.resolve_backend(backend)
        kern = _backend.kernels(self.backend)
        self._kern = kern
        self._fwd = kern.prepare_csr(graph.out_indptr, graph.head, graph.weight)
        bwd_target = graph.tail[graph.in_eids]
        bwd_weight = graph.weight[graph.in_eids]
        self._bwd = kern.prepare_csr(graph.in_indptr, bwd_target, bwd_weight)
        self._ws = kern.make_bidi_workspace(graph.vertex_count)

    def single_source(self, source: int, backward: bool = False) -> SearchResult:
        self._check_vertex(source)
        csr = self._bwd if backward else self._fwd
        dist, parent_slot, order = self._kern.dijkstra(csr, source)
        if backward:
            parent = np.where(
                parent_slot >= 0,
                self.graph.in_eids[np.clip(parent_slot, 0, None)],
                -1,
            )
        else:
            parent = parent_slot  # forward slots are edge ids already
        return SearchResult(dist, parent, order)

    def distance(self, s: int, t: int) -> int:
        self._check_vertex(s)
        self._check_vertex(t)
        return self._kern.bidi_distance(self._fwd, self._bwd, s, t, self._ws)

    def path(self, s: int, t: int) -> tuple[int, list[int]]:
        """Distance and a shortest path as a vertex list (empty when
        unreachable)."""
        self._check_vertex(s)
        self._check_vertex(t)
        dist, meet, fpar, bpar = self._kern.bidi_with_parents(self._fwd, self._bwd, s, t)
        if dist >= INF:
            return INF, []
        tail = self.graph.tail
        head = self.graph.head
        in_eids = self.graph.in_eids
        chain: list[int] = [meet]
        v = meet
        while v != s:
            slot = int(fpar[v])
            eid = slot  # forward slots are edge ids
            v = int(tail[eid])
            chain.append(v)
        chain.reverse()
        v = meet
        while v != t:
            slot = int(bpar[v])
            eid = int(in_eids[slot])
            v = int(head[eid])
            chain.append(v)
        return dist, chain

    def rank_targets(self, source: int, ranks: list[int]) -> list[tuple[int, int | None]]:
        """For each settle rank i (1-based; the source settles at rank 1)
        return (rank, i-th settled vertex), with None marking ranks the
        search never reaches."""
        res = self.single_source(source)
        order = res.settle_order
        out: list[tuple[int, int | None]] = []
        for r in ranks:
            if r < 1:
                raise ValueError(f"settle rank must be positive, got {r}")
            out.append((r, int(order[r - 1]) if r <= order.shape[0] else None))
        return out

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.graph.vertex_count):
            raise ValueError(f"vertex {v} out of range 0..{self.graph.vertex_count - 1}")


def single_source_distances(graph: Graph, source: int, backend: str | None = None) -> SearchResult:
    return DijkstraEngine(graph, backend).single_source(source)


def distance(graph: Graph, s: int, t: int, backend: str | None = None) -> int:
    return DijkstraEngine(graph, backend).distance(s, t)
