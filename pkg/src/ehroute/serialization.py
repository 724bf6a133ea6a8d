"""Binary hierarchy files.

Both formats are little-endian: a 4-byte magic, two u64 counts (vertices,
edges), then int64 arrays back to back, and a trailing u32 crc32 of all
preceding bytes.  Edge-rank hierarchies ("EHv1") store the vertex
permutation, edge columns (tail, head, weight, rank, via), and both
adjacency offset arrays; contraction hierarchies ("CHv1") mirror that
with the contraction order in the permutation slot and no rank column.
Derived orderings (backward edge permutation, upward edge lists) are
recomputed on load and cross-checked against the stored offsets.
"""

from __future__ import annotations

import zlib
from pathlib import Path

import numpy as np

from .hierarchy import (
    ContractionHierarchy,
    EdgeHierarchy,
    finalize_contraction_hierarchy,
)

EH_MAGIC = b"EHv1"
CH_MAGIC = b"CHv1"


class FormatError(RuntimeError):
    pass


def _write(path: str | Path, magic: bytes, n: int, m: int, arrays: list[np.ndarray]) -> None:
    chunks = [magic, np.array([n, m], dtype="<u8").tobytes()]
    chunks.extend(np.ascontiguousarray(a, dtype=np.int64).astype("<i8").tobytes() for a in arrays)
    payload = b"".join(chunks)
    crc = np.array([zlib.crc32(payload)], dtype="<u4").tobytes()
    Path(path).write_bytes(payload + crc)


class _Reader:
    def __init__(self, path: str | Path):
        self.path = str(path)
        try:
            self.data = Path(path).read_bytes()
        except OSError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        if len(self.data) < 4 + 16 + 4:
            raise FormatError(f"{self.path}: truncated header")
        body, stored = self.data[:-4], self.data[-4:]
        if zlib.crc32(body) != int(np.frombuffer(stored, dtype="<u4")[0]):
            raise FormatError(f"{self.path}: checksum mismatch")
        self.magic = body[:4]
        counts = np.frombuffer(body[4:20], dtype="<u8")
        self.n, self.m = int(counts[0]), int(counts[1])
        self.body = body
        self.offset = 20

    def array(self, count: int, what: str) -> np.ndarray:
        end = self.offset + 8 * count
        if end > len(self.body):
            raise FormatError(f"{self.path}: truncated in {what} array")
        out = np.frombuffer(self.body[self.offset:end], dtype="<i8").astype(np.int64)
        self.offset = end
        return out

    def finish(self) -> None:
        if self.offset != len(self.body):
            raise FormatError(f"{self.path}: {len(self.body) - self.offset} trailing bytes")


def save_eh(hierarchy: EdgeHierarchy, path: str | Path) -> None:
    h = hierarchy
    _write(
        path, EH_MAGIC, h.vertex_count, h.edge_count,
        [h.perm, h.tail, h.head, h.weight, h.rank, h.via, h.out_indptr, h.in_indptr],
    )


def load_eh(path: str | Path) -> EdgeHierarchy:
    r = _Reader(path)
    if r.magic != EH_MAGIC:
        raise FormatError(f"{r.path}: bad magic {r.magic!r}, expected {EH_MAGIC!r}")
    n, m = r.n, r.m
    perm = r.array(n, "perm")
    tail = r.array(m, "tail")
    head = r.array(m, "head")
    weight = r.array(m, "weight")
    rank = r.array(m, "rank")
    via = r.array(m, "via")
    out_indptr = r.array(n + 1, "out_indptr")
    in_indptr = r.array(n + 1, "in_indptr")
    r.finish()
    if n and (perm.min() < 0 or perm.max() >= n or np.unique(perm).shape[0] != n):
        raise FormatError(f"{r.path}: perm is not a permutation")
    if m and (
        tail.min() < 0 or tail.max() >= n or head.min() < 0 or head.max() >= n
    ):
        raise FormatError(f"{r.path}: edge endpoint out of range")
    check_out = np.zeros(n + 1, dtype=np.int64)
    np.add.at(check_out, tail + 1, 1)
    np.cumsum(check_out, out=check_out)
    if not np.array_equal(check_out, out_indptr):
        raise FormatError(f"{r.path}: forward offsets inconsistent with edge tails")
    check_in = np.zeros(n + 1, dtype=np.int64)
    np.add.at(check_in, head + 1, 1)
    np.cumsum(check_in, out=check_in)
    if not np.array_equal(check_in, in_indptr):
        raise FormatError(f"{r.path}: backward offsets inconsistent with edge heads")
    if m > 1:
        same_tail = tail[1:] == tail[:-1]
        if (np.diff(tail) < 0).any() or (same_tail & (np.diff(rank) >= 0)).any():
            raise FormatError(f"{r.path}: edges not in (tail, descending rank) order")
    bwd_eids = np.lexsort((-rank, head)).astype(np.int64)
    inv_perm = np.empty_like(perm)
    inv_perm[perm] = np.arange(n, dtype=np.int64)
    return EdgeHierarchy(
        n, perm, inv_perm, tail, head, weight, rank, via,
        out_indptr, in_indptr, bwd_eids,
    )


def save_ch(hierarchy: ContractionHierarchy, path: str | Path) -> None:
    h = hierarchy
    _write(
        path, CH_MAGIC, h.vertex_count, h.edge_count,
        [h.order, h.tail, h.head, h.weight, h.via, h.up_out_indptr, h.up_in_indptr],
    )


def load_ch(path: str | Path) -> ContractionHierarchy:
    r = _Reader(path)
    if r.magic != CH_MAGIC:
        raise FormatError(f"{r.path}: bad magic {r.magic!r}, expected {CH_MAGIC!r}")
    n, m = r.n, r.m
    order = r.array(n, "order")
    tail = r.array(m, "tail")
    head = r.array(m, "head")
    weight = r.array(m, "weight")
    via = r.array(m, "via")
    up_out_indptr = r.array(n + 1, "up_out_indptr")
    up_in_indptr = r.array(n + 1, "up_in_indptr")
    r.finish()
    if n and (order.min() < 0 or order.max() >= n or np.unique(order).shape[0] != n):
        raise FormatError(f"{r.path}: order is not a permutation")
    if m and (
        tail.min() < 0 or tail.max() >= n or head.min() < 0 or head.max() >= n
    ):
        raise FormatError(f"{r.path}: edge endpoint out of range")
    ch = finalize_contraction_hierarchy(n, order, tail, head, weight, via)
    if not (
        np.array_equal(ch.up_out_indptr, up_out_indptr)
        and np.array_equal(ch.up_in_indptr, up_in_indptr)
    ):
        raise FormatError(f"{r.path}: upward offsets inconsistent with order and edges")
    return ch


def load_any(path: str | Path) -> EdgeHierarchy | ContractionHierarchy:
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if head == EH_MAGIC:
        return load_eh(path)
    if head == CH_MAGIC:
        return load_ch(path)
    raise FormatError(f"{path}: unrecognized magic {head!r}")
