from __future__ import annotations

import numpy as np
import pytest

from ehroute import (
    EHQuery,
    FormatError,
    build_contraction_hierarchy,
    build_edge_hierarchy,
    load_any,
    load_ch,
    load_eh,
    save_ch,
    save_eh,
)
from ehroute.hierarchy import ContractionHierarchy, EdgeHierarchy
from conftest import random_graph


@pytest.fixture(scope="module")
def built():
    g = random_graph(9001, 20, 0.25)
    eh = build_edge_hierarchy(g, backend="pure")
    ch = build_contraction_hierarchy(g, backend="pure")
    return g, eh, ch


def test_eh_round_trip(tmp_path, built):
    g, eh, _ = built
    p = tmp_path / "g.eh"
    save_eh(eh, p)
    back = load_eh(p)
    for field in ("perm", "inv_perm", "tail", "head", "weight", "rank", "via",
                  "out_indptr", "in_indptr", "bwd_eids"):
        assert np.array_equal(getattr(eh, field), getattr(back, field)), field
    assert back.vertex_count == eh.vertex_count
    # loaded hierarchy answers queries identically
    qa, qb = EHQuery(eh, backend="pure"), EHQuery(back, backend="pure")
    for s in range(0, 20, 3):
        for t in range(0, 20, 4):
            assert qa.distance(s, t) == qb.distance(s, t)


def test_ch_round_trip(tmp_path, built):
    _, _, ch = built
    p = tmp_path / "g.ch"
    save_ch(ch, p)
    back = load_ch(p)
    for field in ("order", "tail", "head", "weight", "via",
                  "up_out_indptr", "up_out_eids", "up_in_indptr", "up_in_eids"):
        assert np.array_equal(getattr(ch, field), getattr(back, field)), field


def test_load_any_dispatch(tmp_path, built):
    _, eh, ch = built
    pe, pc = tmp_path / "a.bin", tmp_path / "b.bin"
    save_eh(eh, pe)
    save_ch(ch, pc)
    assert isinstance(load_any(pe), EdgeHierarchy)
    assert isinstance(load_any(pc), ContractionHierarchy)


def test_bad_magic(tmp_path, built):
    _, eh, _ = built
    p = tmp_path / "g.eh"
    save_eh(eh, p)
    raw = bytearray(p.read_bytes())
    raw[:4] = b"ZZv9"
    p.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="checksum|magic"):
        load_any(p)


def test_wrong_loader_rejects_magic(tmp_path, built):
    _, eh, ch = built
    pe, pc = tmp_path / "a.eh", tmp_path / "b.ch"
    save_eh(eh, pe)
    save_ch(ch, pc)
    with pytest.raises(FormatError, match="magic"):
        load_eh(pc)
    with pytest.raises(FormatError, match="magic"):
        load_ch(pe)


def test_truncation(tmp_path, built):
    _, eh, _ = built
    p = tmp_path / "g.eh"
    save_eh(eh, p)
    raw = p.read_bytes()
    for cut in (3, 10, len(raw) // 2, len(raw) - 5):
        p.write_bytes(raw[:cut])
        with pytest.raises(FormatError):
            load_eh(p)


def test_bit_flip_detected(tmp_path, built):
    _, eh, _ = built
    p = tmp_path / "g.eh"
    save_eh(eh, p)
    raw = bytearray(p.read_bytes())
    raw[len(raw) // 2] ^= 0x40
    p.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="checksum"):
        load_eh(p)


def _rewrite_crc(raw: bytearray) -> bytes:
    import zlib

    body = bytes(raw[:-4])
    crc = np.array([zlib.crc32(body)], dtype="<u4").tobytes()
    return body + crc


def test_inconsistent_offsets_rejected(tmp_path, built):
    # valid crc but offsets that disagree with the edge columns
    _, eh, _ = built
    p = tmp_path / "g.eh"
    save_eh(eh, p)
    raw = bytearray(p.read_bytes())
    n, m = eh.vertex_count, eh.edge_count
    # out_indptr starts after magic(4) + counts(16) + perm(n) + 5 edge columns
    start = 20 + 8 * (n + 5 * m)
    pos = start + 8  # out_indptr[1]
    val = int(np.frombuffer(bytes(raw[pos:pos + 8]), dtype="<i8")[0])
    raw[pos:pos + 8] = np.array([val + 1], dtype="<i8").tobytes()
    p.write_bytes(_rewrite_crc(raw))
    with pytest.raises(FormatError, match="offsets"):
        load_eh(p)


def test_shuffled_edge_order_rejected(tmp_path, built):
    # swap two edges of the same tail so rank order breaks but offsets hold
    _, eh, _ = built
    tails = eh.tail
    swap = None
    for e in range(eh.edge_count - 1):
        if tails[e] == tails[e + 1]:
            swap = e
            break
    assert swap is not None
    cols = {f: getattr(eh, f).copy() for f in ("tail", "head", "weight", "rank", "via")}
    for f in ("head", "weight", "rank", "via"):
        cols[f][[swap, swap + 1]] = cols[f][[swap + 1, swap]]
    p = tmp_path / "g.eh"
    from ehroute.serialization import EH_MAGIC, _write

    _write(p, EH_MAGIC, eh.vertex_count, eh.edge_count,
           [eh.perm, cols["tail"], cols["head"], cols["weight"], cols["rank"],
            cols["via"], eh.out_indptr, eh.in_indptr])
    with pytest.raises(FormatError, match="order"):
        load_eh(p)


def test_missing_file():
    with pytest.raises(FormatError):
        load_any("/nonexistent/path/file.eh")
