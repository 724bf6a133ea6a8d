"""Edge-rank hierarchical route planning.

Preprocess a directed graph once into an edge-ranked hierarchy, then
answer point-to-point shortest-path queries by a pruned bidirectional
search orders of magnitude smaller than plain Dijkstra.  Includes a
contraction-order hierarchy baseline, turn-cost graph expansion, DIMACS
.gr ingestion, and a benchmark harness; hot loops run in a compiled
kernel with a pure-Python fallback (see ehroute._backend).
"""

from ._backend import available_backends, resolve_backend
from .ch import CHQuery, build_contraction_hierarchy
from .construction import build_edge_hierarchy
from .dijkstra import DijkstraEngine
from .graph import (
    INF,
    DimacsFormatError,
    Graph,
    load_gr,
    make_graph,
    parse_dimacs_gr,
    reorder_dfs_preorder,
    save_gr,
    turn_expand,
    write_dimacs_gr,
)
from .hierarchy import (
    ContractionHierarchy,
    CorruptHierarchyError,
    EdgeHierarchy,
    QueryStats,
    StallPolicy,
    STALL_IN_ADVANCE,
    STALL_NONE,
    STALL_ON_DEMAND,
)
from .query import EHQuery, QueryResult, QueryTrace, count_min_vertices
from .serialization import FormatError, load_any, load_ch, load_eh, save_ch, save_eh

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CHQuery",
    "ContractionHierarchy",
    "CorruptHierarchyError",
    "DijkstraEngine",
    "DimacsFormatError",
    "EdgeHierarchy",
    "EHQuery",
    "FormatError",
    "Graph",
    "QueryResult",
    "QueryStats",
    "QueryTrace",
    "StallPolicy",
    "STALL_IN_ADVANCE",
    "STALL_NONE",
    "STALL_ON_DEMAND",
    "available_backends",
    "build_contraction_hierarchy",
    "build_edge_hierarchy",
    "count_min_vertices",
    "load_any",
    "load_ch",
    "load_eh",
    "load_gr",
    "make_graph",
    "parse_dimacs_gr",
    "reorder_dfs_preorder",
    "resolve_backend",
    "save_ch",
    "save_eh",
    "save_gr",
    "turn_expand",
    "write_dimacs_gr",
]
