"""Iterative PageRank over the in-link structure of a citation graph.

The update is synchronous (every new score is computed from the previous
vector) with the rank of dangling nodes redistributed evenly each step so
total mass stays at 1. Iteration starts from the uniform vector and stops
when the L1 change between consecutive vectors drops below epsilon.

Scores are accumulated per node over its in-neighbors in stored ascending
order, and the dangling-mass scalar is reduced in fixed index order, so a
run is bitwise reproducible no matter how many worker threads are used.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PatentFlowError
from .graph import CitationGraph

DANGLING_UNIFORM_ALL = "uniform-all"
DANGLING_UNIFORM_OTHERS = "uniform-others"
_DANGLING_MODES = (DANGLING_UNIFORM_ALL, DANGLING_UNIFORM_OTHERS)

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_ITERATIONS = 1000


@dataclass(frozen=True)
class PageRankParams:
    """Knobs for one PageRank computation."""

    damping: float
    epsilon: float = DEFAULT_EPSILON
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    dangling_mode: str = DANGLING_UNIFORM_ALL

    def __post_init__(self) -> None:
        if not 0.0 <= self.damping < 1.0:
            raise PatentFlowError(f"damping must be in [0, 1), got {self.damping}")
        if not self.epsilon > 0.0:
            raise PatentFlowError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise PatentFlowError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.dangling_mode not in _DANGLING_MODES:
            raise PatentFlowError(
                f"dangling_mode must be one of {_DANGLING_MODES}, got {self.dangling_mode!r}"
            )


@dataclass(frozen=True)
class PageRankResult:
    scores: np.ndarray
    iterations: int
    final_delta: float
    converged: bool
    params: PageRankParams


def convergence_delta(prev: np.ndarray, nxt: np.ndarray) -> float:
    """L1 distance between two score vectors."""
    prev = np.asarray(prev, dtype=np.float64)
    nxt = np.asarray(nxt, dtype=np.float64)
    if prev.shape != nxt.shape:
        raise PatentFlowError(
            f"score vectors differ in length: {prev.shape} vs {nxt.shape}"
        )
    return float(np.abs(nxt - prev).sum())


class _SegmentPlan:
    """Per-worker slice of the CSR in-edge accumulation.

    Segment sums are computed with np.add.reduceat over the node range
    [lo, hi); each segment reduction touches only its own slice of the
    contribution array, so results are independent of how node ranges are
    partitioned across workers.
    """

    __slots__ = ("lo", "hi", "nonempty", "starts", "stop")

    def __init__(self, indptr: np.ndarray, lo: int, hi: int) -> None:
        self.lo = lo
        self.hi = hi
        seg_start = indptr[lo:hi]
        seg_end = indptr[lo + 1:hi + 1]
        self.nonempty = seg_start < seg_end
        self.starts = seg_start[self.nonempty]
        self.stop = int(indptr[hi])

    def accumulate(self, values: np.ndarray, out: np.ndarray) -> None:
        block = out[self.lo:self.hi]
        block.fill(0.0)
        if self.starts.size:
            block[self.nonempty] = np.add.reduceat(values[:self.stop], self.starts)


def _make_plans(indptr: np.ndarray, node_count: int, threads: int) -> list[_SegmentPlan]:
    threads = max(1, min(int(threads), node_count))
    bounds = np.linspace(0, node_count, threads + 1).astype(np.int64)
    return [
        _SegmentPlan(indptr, int(bounds[i]), int(bounds[i + 1]))
        for i in range(threads)
        if bounds[i] < bounds[i + 1]
    ]


def pagerank(graph: CitationGraph, params: PageRankParams, threads: int = 1) -> PageRankResult:
    """Run the iterative scheme until the L1 delta drops below epsilon.

    Hitting max_iterations is reported via ``converged=False``, not raised,
    so sweeps over slow damping values always complete.
    """
    n = graph.node_count
    if n == 0:
        raise PatentFlowError("pagerank requires a non-empty graph")

    d = params.damping
    base = (1.0 - d) / n
    dangling = graph.dangling_nodes
    inv_out = np.zeros(n)
    linked = graph.out_degrees > 0
    inv_out[linked] = 1.0 / graph.out_degrees[linked]
    # uniform-others degenerates to uniform-all on a single-node graph:
    # there is no "other" node to receive the mass.
    exclude_self = params.dangling_mode == DANGLING_UNIFORM_OTHERS and n > 1

    plans = _make_plans(graph.in_indptr, n, threads)
    pool = ThreadPoolExecutor(max_workers=len(plans)) if len(plans) > 1 else None

    cur = np.full(n, 1.0 / n)
    values = np.empty(graph.in_indices.size)
    inflow = np.empty(n)
    iterations = 0
    delta = float("inf")
    converged = False
    try:
        for iterations in range(1, params.max_iterations + 1):
            dangling_mass = float(cur[dangling].sum()) if dangling.size else 0.0
            np.take(cur * inv_out, graph.in_indices, out=values)
            if pool is None:
                plans[0].accumulate(values, inflow)
            else:
                list(pool.map(lambda p: p.accumulate(values, inflow), plans))
            if exclude_self:
                nxt = base + d * (inflow + dangling_mass / (n - 1.0))
                if dangling.size:
                    nxt[dangling] -= d * (cur[dangling] / (n - 1.0))
            else:
                nxt = base + d * (inflow + dangling_mass / n)
            delta = convergence_delta(cur, nxt)
            cur = nxt
            if delta < params.epsilon:
                converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()

    cur.flags.writeable = False
    return PageRankResult(
        scores=cur,
        iterations=iterations,
        final_delta=delta,
        converged=converged,
        params=params,
    )


def pagerank_sweep(
    graph: CitationGraph,
    damping_values: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    dangling_mode: str = DANGLING_UNIFORM_ALL,
    threads: int = 1,
) -> list[PageRankResult]:
    """Independent runs, one per damping value, each from the uniform start."""
    params_list = [
        PageRankParams(
            damping=float(d),
            epsilon=epsilon,
            max_iterations=max_iterations,
            dangling_mode=dangling_mode,
        )
        for d in damping_values
    ]
    return [pagerank(graph, p, threads=threads) for p in params_list]


def write_scores_tsv(
    index_to_id: Sequence[str], scores: np.ndarray, path: str | os.PathLike
) -> None:
    """Export ``node_index<TAB>external_id<TAB>score`` rows, 17 significant digits."""
    if len(index_to_id) != len(scores):
        raise PatentFlowError("id list and score vector differ in length")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i, (pid, score) in enumerate(zip(index_to_id, scores)):
            f.write(f"{i}\t{pid}\t{score:.17g}\n")
