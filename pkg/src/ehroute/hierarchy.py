"""Hierarchy containers shared by construction, queries, and serialization.

An EdgeHierarchy stores the input graph plus shortcuts, every edge
carrying a distinct rank (the global order in which construction ranked
it) and a via vertex for shortcut unpacking (-1 on input edges).
Vertices are renumbered to DFS preorder at finalization for locality;
``perm`` maps input ids to internal ids and all public entry points
translate, so callers only ever see input ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .graph import dfs_preorder_perm


class CorruptHierarchyError(RuntimeError):
    pass


@dataclass(frozen=True)
class StallPolicy:
    """Query-time stalling flavor.  kind is one of none, on-demand,
    in-advance, partial; fraction applies to partial only."""

    kind: str
    fraction: float = 1.0

    CODES = {"none": 0, "on-demand": 1, "in-advance": 2, "partial": 3}

    def __post_init__(self):
        if self.kind not in self.CODES:
            raise ValueError(f"unknown stall policy {self.kind!r}")
        if self.kind == "partial" and not (0.0 <= self.fraction <= 1.0):
            raise ValueError("partial stall fraction must be in [0, 1]")

    @property
    def code(self) -> int:
        return self.CODES[self.kind]

    @classmethod
    def parse(cls, text: str) -> "StallPolicy":
        text = text.strip()
        if text.startswith("partial:"):
            return cls("partial", float(text.split(":", 1)[1]))
        if text == "partial":
            return cls("partial", 1.0)
        return cls(text)

    def __str__(self) -> str:
        if self.kind == "partial":
            return f"partial:{self.fraction:g}"
        return self.kind


STALL_NONE = StallPolicy("none")
STALL_ON_DEMAND = StallPolicy("on-demand")
STALL_IN_ADVANCE = StallPolicy("in-advance")


@dataclass
class QueryStats:
    settled: int = 0
    relaxed: int = 0
    stall_checks: int = 0
    min_vertices: int | None = None
    elapsed_seconds: float = 0.0


@dataclass(frozen=True)
class EdgeHierarchy:
    """Finalized edge-ranked hierarchy.

    Edges are stored once, sorted by (tail, rank descending); that order
    is the forward adjacency directly, so ``fwd of vertex u`` is the slice
    out_indptr[u]:out_indptr[u+1] of the edge arrays.  ``bwd_eids``
    permutes edges into (head, rank descending) order for the backward
    adjacency.  All vertex ids here are internal (DFS preorder).
    """

    vertex_count: int
    perm: np.ndarray  # input id -> internal id
    inv_perm: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    weight: np.ndarray
    rank: np.ndarray
    via: np.ndarray  # skipped middle vertex (internal id), -1 on input edges
    out_indptr: np.ndarray
    in_indptr: np.ndarray
    bwd_eids: np.ndarray
    round_log: tuple[tuple[int, int, int], ...] = field(default=(), compare=False)

    @property
    def edge_count(self) -> int:
        return int(self.tail.shape[0])

    @property
    def shortcut_count(self) -> int:
        return int((self.via >= 0).sum())

    def edge_lookup(self) -> dict[tuple[int, int], int]:
        table = getattr(self, "_edge_lookup", None)
        if table is None:
            table = {
                (int(self.tail[e]), int(self.head[e])): e
                for e in range(self.edge_count)
            }
            object.__setattr__(self, "_edge_lookup", table)
        return table

    def unpack_edge(self, eid: int) -> Iterator[int]:
        """Yield the input-graph edge ids (internal numbering) under eid,
        in path order.  Raises CorruptHierarchyError on via cycles or
        weight mismatches."""
        lookup = self.edge_lookup()
        # depth bound: a well-formed via tree over m edges cannot nest
        # deeper than m
        limit = self.edge_count + 1

        def walk(e: int, depth: int) -> Iterator[int]:
            if depth > limit:
                raise CorruptHierarchyError("via chain exceeds edge count; cycle suspected")
            mid = int(self.via[e])
            if mid < 0:
                yield e
                return
            u, v = int(self.tail[e]), int(self.head[e])
            first = lookup.get((u, mid))
            second = lookup.get((mid, v))
            if first is None or second is None:
                raise CorruptHierarchyError(f"edge {e}: via vertex {mid} has no constituent edges")
            if self.weight[first] + self.weight[second] != self.weight[e]:
                raise CorruptHierarchyError(f"edge {e}: constituent weights do not sum")
            yield from walk(first, depth + 1)
            yield from walk(second, depth + 1)

        yield from walk(eid, 0)


def finalize_edge_hierarchy(
    vertex_count: int,
    tail: np.ndarray,
    head: np.ndarray,
    weight: np.ndarray,
    rank: np.ndarray,
    via: np.ndarray,
    round_log: tuple[tuple[int, int, int], ...] = (),
) -> EdgeHierarchy:
    """Renumber to DFS preorder and freeze the two adjacency orders.
    Expects every edge ranked (distinct, non-negative)."""
    tail = np.asarray(tail, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    weight = np.asarray(weight, dtype=np.int64)
    rank = np.asarray(rank, dtype=np.int64)
    via = np.asarray(via, dtype=np.int64)
    if rank.shape[0] and (rank < 0).any():
        raise ValueError("unranked edge in finalize")
    order = np.lexsort((head, tail))
    csr_indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(csr_indptr, tail + 1, 1)
    np.cumsum(csr_indptr, out=csr_indptr)
    perm = dfs_preorder_perm(vertex_count, csr_indptr, head[order])
    tail = perm[tail]
    head = perm[head]
    via = np.where(via >= 0, perm[np.clip(via, 0, None)], -1)
    canon = np.lexsort((-rank, tail))
    tail, head, weight, rank, via = (
        tail[canon], head[canon], weight[canon], rank[canon], via[canon]
    )
    out_indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(out_indptr, tail + 1, 1)
    np.cumsum(out_indptr, out=out_indptr)
    bwd_eids = np.lexsort((-rank, head)).astype(np.int64)
    in_indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(in_indptr, head + 1, 1)
    np.cumsum(in_indptr, out=in_indptr)
    inv_perm = np.empty_like(perm)
    inv_perm[perm] = np.arange(vertex_count, dtype=np.int64)
    return EdgeHierarchy(
        vertex_count, perm, inv_perm, tail, head, weight, rank, via,
        out_indptr, in_indptr, bwd_eids, tuple(round_log),
    )


@dataclass(frozen=True)
class ContractionHierarchy:
    """Vertex-ordered hierarchy baseline.

    ``order[v]`` is v's contraction position.  Edges keep input vertex
    ids; each edge has exactly one lower-ordered endpoint, so the edge
    set splits into upward-out (stored at the tail) and upward-in
    (stored at the head) adjacency, both needed by the bidirectional
    query and its stall test.
    """

    vertex_count: int
    order: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    weight: np.ndarray
    via: np.ndarray
    up_out_indptr: np.ndarray
    up_out_eids: np.ndarray
    up_in_indptr: np.ndarray
    up_in_eids: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.tail.shape[0])

    @property
    def shortcut_count(self) -> int:
        return int((self.via >= 0).sum())


def finalize_contraction_hierarchy(
    vertex_count: int,
    order: np.ndarray,
    tail: np.ndarray,
    head: np.ndarray,
    weight: np.ndarray,
    via: np.ndarray,
) -> ContractionHierarchy:
    order = np.asarray(order, dtype=np.int64)
    tail = np.asarray(tail, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    weight = np.asarray(weight, dtype=np.int64)
    via = np.asarray(via, dtype=np.int64)
    canon = np.lexsort((head, tail))
    tail, head, weight, via = tail[canon], head[canon], weight[canon], via[canon]
    upward = order[head] > order[tail]
    eids = np.arange(tail.shape[0], dtype=np.int64)
    up_out_eids = eids[upward]
    up_in_eids = eids[~upward]
    up_in_eids = up_in_eids[np.lexsort((tail[up_in_eids], head[up_in_eids]))]
    up_out_indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(up_out_indptr, tail[up_out_eids] + 1, 1)
    np.cumsum(up_out_indptr, out=up_out_indptr)
    up_in_indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(up_in_indptr, head[up_in_eids] + 1, 1)
    np.cumsum(up_in_indptr, out=up_in_indptr)
    return ContractionHierarchy(
        vertex_count, order, tail, head, weight, via,
        up_out_indptr, up_out_eids, up_in_indptr, up_in_eids,
    )
