"""Point-to-point queries over a finalized edge-rank hierarchy.

Bidirectional search where a vertex carries the rank of the edge that
set its label and only relaxes edges ranked at least that high; the two
frontiers prune against the best meeting value seen so far.  Four
stalling flavors trade extra checks for fewer settled vertices; all four
return exact distances.  Public entry points speak input vertex ids and
translate to the hierarchy's internal DFS numbering at the boundary.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from .graph import INF
from .hierarchy import (
    CorruptHierarchyError,
    EdgeHierarchy,
    QueryStats,
    StallPolicy,
    STALL_NONE,
)


@dataclass(frozen=True)
class QueryTrace:
    """Settled vertices (input ids) with their settle distances, per
    search direction."""

    forward_vertices: np.ndarray
    forward_dists: np.ndarray
    backward_vertices: np.ndarray
    backward_dists: np.ndarray


@dataclass(frozen=True)
class QueryResult:
    distance: int  # INF when unreachable
    meeting_vertex: int | None  # input id
    packed_edges: tuple[int, ...]  # hierarchy edge ids along the up-down path
    stats: QueryStats
    trace: QueryTrace | None = None

    @property
    def reachable(self) -> bool:
        return self.distance < INF


class EHQuery:
    def __init__(self, hierarchy: EdgeHierarchy, backend: str | None = None):
        self.hierarchy = hierarchy
        self.backend = _backend.resolve_backend(backend)
        kern = _backend.kernels(self.backend)
        self._kern = kern
        h = hierarchy
        be = h.bwd_eids
        self._view = kern.prepare_eh(
            h.out_indptr, h.head, h.weight, h.rank,
            h.in_indptr, h.tail[be], h.weight[be], h.rank[be],
        )
        self._ws = kern.make_eh_workspace(h.vertex_count)

    def query(
        self,
        s: int,
        t: int,
        policy: StallPolicy = STALL_NONE,
        *,
        with_path: bool = False,
        with_trace: bool = False,
        check_single_relax: bool = False,
    ) -> QueryResult:
        h = self.hierarchy
        n = h.vertex_count
        if not (0 <= s < n and 0 <= t < n):
            raise ValueError(f"vertex out of range 0..{n - 1}")
        si = int(h.perm[s])
        ti = int(h.perm[t])
        t0 = time.perf_counter()
        dist, meet, settled, relaxed, stall_checks, fpar, bpar, trace = self._kern.eh_query(
            self._view, self._ws, si, ti, policy.code, policy.fraction,
            with_path, with_trace, check_single_relax,
        )
        elapsed = time.perf_counter() - t0
        stats = QueryStats(
            settled=settled, relaxed=relaxed, stall_checks=stall_checks,
            elapsed_seconds=elapsed,
        )
        packed: tuple[int, ...] = ()
        if with_path and dist < INF:
            packed = self._extract_packed(si, ti, meet, fpar, bpar)
        meeting = int(h.inv_perm[meet]) if dist < INF else None
        out_trace = None
        if with_trace and trace is not None:
            inv = h.inv_perm
            out_trace = QueryTrace(
                inv[trace[0]], trace[1].copy(), inv[trace[2]], trace[3].copy()
            )
        return QueryResult(dist, meeting, packed, stats, out_trace)

    def distance(self, s: int, t: int, policy: StallPolicy = STALL_NONE) -> int:
        return self.query(s, t, policy).distance

    def _extract_packed(self, si, ti, meet, fpar, bpar) -> tuple[int, ...]:
        h = self.hierarchy
        tail, head, be = h.tail, h.head, h.bwd_eids
        limit = h.edge_count + 1
        fwd: list[int] = []
        v = meet
        steps = 0
        while v != si:
            slot = int(fpar[v])
            if slot < 0 or steps > limit:
                raise CorruptHierarchyError("forward parent chain broken")
            fwd.append(slot)  # forward slots are canonical edge ids
            v = int(tail[slot])
            steps += 1
        fwd.reverse()
        v = meet
        steps = 0
        while v != ti:
            slot = int(bpar[v])
            if slot < 0 or steps > limit:
                raise CorruptHierarchyError("backward parent chain broken")
            eid = int(be[slot])
            fwd.append(eid)
            v = int(head[eid])
            steps += 1
        return tuple(fwd)

    def unpack(self, result: QueryResult) -> list[tuple[int, int, int]]:
        """Expand a packed path to input-graph edges as (tail, head,
        weight) triples in path order, endpoints in input ids."""
        h = self.hierarchy
        inv = h.inv_perm
        out: list[tuple[int, int, int]] = []
        for eid in result.packed_edges:
            for base in h.unpack_edge(eid):
                out.append(
                    (
                        int(inv[h.tail[base]]),
                        int(inv[h.head[base]]),
                        int(h.weight[base]),
                    )
                )
        return out


def count_min_vertices(
    truth_forward: np.ndarray, truth_backward: np.ndarray, trace: QueryTrace
) -> int:
    """Settled vertices whose settle distance equals the true distance
    from their search origin.  truth arrays are indexed by input vertex
    id (forward: from the source; backward: to the target)."""
    fwd = int(
        (truth_forward[trace.forward_vertices] == trace.forward_dists).sum()
    )
    bwd = int(
        (truth_backward[trace.backward_vertices] == trace.backward_dists).sum()
    )
    return fwd + bwd
