"""Minimum bipartite vertex cover via maximum matching.

Kuhn's augmenting-path matching processed over the left side in
ascending order, then the alternating-reachability cover extraction.
The instance is canonicalized (sides and adjacency sorted) so the cover
is a pure function of the edge set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class BipartiteInstance:
    lefts: tuple[int, ...]
    rights: tuple[int, ...]
    # adjacency by side-local index, each row sorted
    adj: tuple[tuple[int, ...], ...]

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.adj)


def build_instance(pairs: Iterable[tuple[int, int]]) -> BipartiteInstance:
    """Canonicalize (left id, right id) pairs; ids live in independent
    namespaces, duplicates collapse."""
    pair_set = set(pairs)
    lefts = tuple(sorted({p[0] for p in pair_set}))
    rights = tuple(sorted({p[1] for p in pair_set}))
    lidx = {v: i for i, v in enumerate(lefts)}
    ridx = {v: i for i, v in enumerate(rights)}
    rows: list[list[int]] = [[] for _ in lefts]
    for a, b in pair_set:
        rows[lidx[a]].append(ridx[b])
    return BipartiteInstance(lefts, rights, tuple(tuple(sorted(r)) for r in rows))


def max_matching(inst: BipartiteInstance) -> list[int]:
    """Returns match[right index] = left index or -1."""
    nl = len(inst.lefts)
    nr = len(inst.rights)
    match_r = [-1] * nr
    match_l = [-1] * nl

    def try_augment(li: int, seen: list[bool]) -> bool:
        for ri in inst.adj[li]:
            if seen[ri]:
                continue
            seen[ri] = True
            if match_r[ri] < 0 or try_augment(match_r[ri], seen):
                match_r[ri] = li
                match_l[li] = ri
                return True
        return False

    for li in range(nl):
        try_augment(li, [False] * nr)
    return match_r


def min_vertex_cover(inst: BipartiteInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Minimum vertex cover as (left ids, right ids), both sorted.

    Alternating reachability from unmatched lefts: Z grows along
    non-matching edges left-to-right and matching edges right-to-left;
    the cover is (L minus Z) plus (R intersect Z).  Its size equals the
    matching size and every edge has an endpoint in it.
    """
    match_r = max_matching(inst)
    nl = len(inst.lefts)
    match_l = [-1] * nl
    for ri, li in enumerate(match_r):
        if li >= 0:
            match_l[li] = ri
    in_z_l = [False] * nl
    in_z_r = [False] * len(inst.rights)
    stack = [li for li in range(nl) if match_l[li] < 0]
    for li in stack:
        in_z_l[li] = True
    while stack:
        li = stack.pop()
        for ri in inst.adj[li]:
            if in_z_r[ri]:
                continue
            if match_l[li] == ri:
                continue  # only non-matching edges go left-to-right
            in_z_r[ri] = True
            li2 = match_r[ri]
            if li2 >= 0 and not in_z_l[li2]:
                in_z_l[li2] = True
                stack.append(li2)
    cover_l = tuple(inst.lefts[li] for li in range(nl) if not in_z_l[li])
    cover_r = tuple(inst.rights[ri] for ri in range(len(inst.rights)) if in_z_r[ri])
    return cover_l, cover_r
