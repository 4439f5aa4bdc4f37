"""Immutable compressed adjacency for directed citation graphs.

Nodes are dense integers in ``[0, node_count)``. The graph stores both
directions (out-links and in-links) as CSR-style index arrays so degree
queries are O(1) and neighbor iteration is a contiguous slice either way.
Self-loops and duplicate edges are dropped at build time and counted.
"""
from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import MalformedEdgeError, PatentFlowError


@dataclass(frozen=True)
class GraphBuildReport:
    """Edge bookkeeping from one build_graph call."""

    edges_input: int
    edges_stored: int
    self_loops_dropped: int
    duplicate_edges_dropped: int


class CitationGraph:
    """Directed graph frozen after construction.

    All arrays are marked read-only, so a graph can be shared across
    threads without locking. Neighbor lists are sorted ascending, which
    fixes the floating-point accumulation order for anything that folds
    over them.
    """

    __slots__ = (
        "node_count",
        "out_indptr",
        "out_indices",
        "in_indptr",
        "in_indices",
        "out_degrees",
        "in_degrees",
        "dangling_nodes",
        "build_report",
    )

    def __init__(
        self,
        node_count: int,
        out_indptr: np.ndarray,
        out_indices: np.ndarray,
        in_indptr: np.ndarray,
        in_indices: np.ndarray,
        build_report: GraphBuildReport,
    ) -> None:
        self.node_count = int(node_count)
        self.out_indptr = out_indptr
        self.out_indices = out_indices
        self.in_indptr = in_indptr
        self.in_indices = in_indices
        self.out_degrees = np.diff(out_indptr)
        self.in_degrees = np.diff(in_indptr)
        self.dangling_nodes = np.flatnonzero(self.out_degrees == 0)
        self.build_report = build_report
        for arr in (
            self.out_indptr,
            self.out_indices,
            self.in_indptr,
            self.in_indices,
            self.out_degrees,
            self.in_degrees,
            self.dangling_nodes,
        ):
            arr.flags.writeable = False

    @property
    def edge_count(self) -> int:
        return int(self.out_indices.size)

    @property
    def dangling_set(self) -> frozenset[int]:
        return frozenset(int(u) for u in self.dangling_nodes)

    def out_degree(self, u: int) -> int:
        return int(self.out_degrees[u])

    def in_degree(self, u: int) -> int:
        return int(self.in_degrees[u])

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[u]:self.out_indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[u]:self.in_indptr[u + 1]]

    def edge_array(self) -> np.ndarray:
        """All stored edges as an (m, 2) array ordered by (source, target)."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degrees)
        return np.column_stack((src, self.out_indices))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, v in self.edge_array():
            yield int(u), int(v)

    def has_cycle(self) -> bool:
        """Diagnostic: True when the directed graph contains a cycle.

        Kahn peeling; intended for test-scale graphs, not the hot path.
        """
        indeg = self.in_degrees.copy()
        stack = [int(u) for u in np.flatnonzero(indeg == 0)]
        seen = 0
        while stack:
            u = stack.pop()
            seen += 1
            for v in self.out_neighbors(u):
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(int(v))
        return seen != self.node_count

    def __repr__(self) -> str:
        return (
            f"CitationGraph(nodes={self.node_count}, edges={self.edge_count}, "
            f"dangling={self.dangling_nodes.size})"
        )


def _csr_from_pairs(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    indices = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def build_graph(edges, node_count: int) -> CitationGraph:
    """Build a CitationGraph from (citing, cited) index pairs.

    Self-loops and duplicate pairs are dropped and counted in the build
    report. Raises MalformedEdgeError if any index falls outside
    ``[0, node_count)``.
    """
    n = int(node_count)
    if n < 0:
        raise PatentFlowError(f"node_count must be non-negative, got {node_count}")
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise PatentFlowError("edges must be a sequence of (citing, cited) pairs")
    edges_input = arr.shape[0]
    src = arr[:, 0]
    dst = arr[:, 1]

    bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
    if bad.any():
        i = int(np.argmax(bad))
        raise MalformedEdgeError(
            f"edge ({int(src[i])}, {int(dst[i])}) out of range for node_count={n}"
        )

    loops = src == dst
    self_loops = int(loops.sum())
    if self_loops:
        src, dst = src[~loops], dst[~loops]

    duplicates = 0
    if src.size:
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        dup = np.zeros(src.size, dtype=bool)
        dup[1:] = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
        duplicates = int(dup.sum())
        if duplicates:
            src, dst = src[~dup], dst[~dup]

    report = GraphBuildReport(
        edges_input=edges_input,
        edges_stored=int(src.size),
        self_loops_dropped=self_loops,
        duplicate_edges_dropped=duplicates,
    )
    out_indptr, out_indices = _csr_from_pairs(src, dst, n)
    in_indptr, in_indices = _csr_from_pairs(dst, src, n)
    return CitationGraph(n, out_indptr, out_indices, in_indptr, in_indices, report)


def induced_subgraph(graph: CitationGraph, keep) -> tuple[CitationGraph, np.ndarray]:
    """Restrict a graph to the given node set.

    Returns the re-indexed subgraph plus the old-to-new remap array
    (length ``graph.node_count``, -1 for dropped nodes). New indices
    follow ascending old-index order.
    """
    keep_arr = np.unique(np.asarray(list(keep) if isinstance(keep, (set, frozenset)) else keep,
                                    dtype=np.int64))
    if keep_arr.size and (keep_arr[0] < 0 or keep_arr[-1] >= graph.node_count):
        raise PatentFlowError("keep set contains indices outside the graph")
    remap = np.full(graph.node_count, -1, dtype=np.int64)
    remap[keep_arr] = np.arange(keep_arr.size, dtype=np.int64)

    src = np.repeat(np.arange(graph.node_count, dtype=np.int64), graph.out_degrees)
    dst = graph.out_indices
    mask = (remap[src] >= 0) & (remap[dst] >= 0)
    new_edges = np.column_stack((remap[src[mask]], remap[dst[mask]]))
    sub = build_graph(new_edges, keep_arr.size)
    return sub, remap
