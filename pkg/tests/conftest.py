from __future__ import annotations

import os
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

import ehroute

# ---------------------------------------------------------------------------
# deterministic random graphs


def random_triples(seed: int, n: int, p: float, wmax: int = 100):
    """Seeded Erdos-Renyi style digraph triples; weights 0..wmax inclusive."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    weights = rng.integers(0, wmax + 1, size=(n, n))
    us, vs = np.nonzero(mask)
    return [(int(u), int(v), int(weights[u, v])) for u, v in zip(us, vs)]


def random_graph(seed: int, n: int, p: float, wmax: int = 100) -> ehroute.Graph:
    return ehroute.make_graph(n, random_triples(seed, n, p, wmax))


ALL_BACKENDS = ehroute.available_backends()


@pytest.fixture(params=ALL_BACKENDS)
def backend(request) -> str:
    return request.param


# ---------------------------------------------------------------------------
# desk-scale road data (optional): acceptance tests that need the real
# network skip with a pointer to the fetch script when it is absent

DATA_ENV = "EHROUTE_DATA_DIR"


def road_data_path(name: str) -> Path | None:
    roots = []
    if os.environ.get(DATA_ENV):
        roots.append(Path(os.environ[DATA_ENV]))
    roots.append(Path(__file__).resolve().parent.parent / "data")
    for root in roots:
        for candidate in (root / name, root / (name + ".gz")):
            if candidate.exists():
                return candidate
    return None


def require_road_data(name: str) -> Path:
    path = road_data_path(name)
    if path is None:
        pytest.skip(
            f"road network {name} not present (run scripts/fetch_dimacs_bay.py "
            f"or point {DATA_ENV} at it)"
        )
    return path


# ---------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary

_ACCEPTANCE: list[tuple[str, str]] = []


@contextmanager
def acceptance(name: str):
    try:
        yield
    except pytest.skip.Exception as exc:
        _ACCEPTANCE.append((name, f"SKIP ({exc})"))
        raise
    except BaseException:
        _ACCEPTANCE.append((name, "FAIL"))
        raise
    _ACCEPTANCE.append((name, "PASS"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _ACCEPTANCE:
        terminalreporter.write_line(f"[{status.split(' ')[0]:4s}] {name}" +
                                    ("" if " " not in status else f"  {status.split(' ', 1)[1]}"))
