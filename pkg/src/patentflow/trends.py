"""Class-selective temporal analysis of citation flows.

The central quantity is the per-year inflow into a target class: every
patent outside that class that cites at least one patent inside it
contributes once, bucketed by its own class and grant year. The
contribution is either the citing patent's PageRank score or a plain
count. Patents with an unknown class or year stay in the graph (they
carry rank mass) but never enter these aggregations.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import PatentFlowError
from .graph import induced_subgraph
from .ingest import DatasetBuildReport, PatentDataset
from .pagerank import PageRankParams, PageRankResult, pagerank

METRIC_PAGERANK_SUM = "pagerank-sum"
METRIC_CITATION_COUNT = "citation-count"
_METRICS = (METRIC_PAGERANK_SUM, METRIC_CITATION_COUNT)

REASON_OWNED = "owned"
REASON_CITES_OWNED = "cites-owned"
REASON_CITED_BY_OWNED = "cited-by-owned"


@dataclass(frozen=True)
class ClassFlowSeries:
    """Flow into ``target_class`` keyed by (source_class, year).

    Only pairs with at least one qualifying citing patent appear; missing
    pairs mean zero flow. Values are ints for the citation-count metric.
    """

    target_class: str
    metric: str
    entries: Mapping[tuple[str, int], float]

    def flow(self, source_class: str, year: int) -> float:
        return self.entries.get((source_class, year), 0)

    def years(self) -> list[int]:
        return sorted({year for _, year in self.entries})

    def source_classes(self) -> list[str]:
        return sorted({cls for cls, _ in self.entries})


def _require_scores(dataset: PatentDataset, result: PageRankResult) -> np.ndarray:
    if len(result.scores) != dataset.node_count:
        raise PatentFlowError(
            "score vector length does not match the dataset's node count"
        )
    return result.scores


def class_inflow_series(
    dataset: PatentDataset,
    result: PageRankResult,
    target_class: str,
    metric: str = METRIC_PAGERANK_SUM,
) -> ClassFlowSeries:
    """Aggregate external-class citations into ``target_class``.

    A citing patent counts once no matter how many target-class patents it
    cites. Citers of the target class itself, and citers with unknown
    class or year, are skipped.
    """
    if metric not in _METRICS:
        raise PatentFlowError(f"metric must be one of {_METRICS}, got {metric!r}")
    scores = _require_scores(dataset, result)
    graph = dataset.graph
    citers: set[int] = set()
    for t in range(dataset.node_count):
        if dataset.meta[t].primary_class == target_class:
            citers.update(int(u) for u in graph.in_neighbors(t))

    entries: dict[tuple[str, int], float] = {}
    for u in sorted(citers):
        m = dataset.meta[u]
        if not m.class_known or not m.year_known or m.primary_class == target_class:
            continue
        key = (m.primary_class, m.grant_year)
        if metric == METRIC_PAGERANK_SUM:
            entries[key] = entries.get(key, 0.0) + float(scores[u])
        else:
            entries[key] = entries.get(key, 0) + 1
    return ClassFlowSeries(target_class=target_class, metric=metric, entries=entries)


def patent_inflow_breakdown(
    dataset: PatentDataset, result: PageRankResult, patent: int
) -> dict[tuple[str, int], tuple[int, float]]:
    """Citers of one patent, bucketed by their class and year.

    Returns ``(count, pagerank_sum)`` per bucket; citers with unknown
    class or year are skipped. Same-class citers are included here, unlike
    in the class-level series.
    """
    if not 0 <= patent < dataset.node_count:
        raise PatentFlowError(f"patent index {patent} out of range")
    scores = _require_scores(dataset, result)
    out: dict[tuple[str, int], tuple[int, float]] = {}
    for u in dataset.graph.in_neighbors(patent):
        m = dataset.meta[int(u)]
        if not m.class_known or not m.year_known:
            continue
        key = (m.primary_class, m.grant_year)
        count, total = out.get(key, (0, 0.0))
        out[key] = (count + 1, total + float(scores[u]))
    return out


def class_ratio(
    series: ClassFlowSeries,
    class_a: str,
    class_b: str,
    year_window: tuple[int, int] | None = None,
) -> dict[int, float]:
    """Per-year ``flow(a) / flow(b)``; years with zero denominator are absent."""
    years = series.years()
    if year_window is not None:
        lo, hi = year_window
        years = [y for y in years if lo <= y <= hi]
    ratios: dict[int, float] = {}
    for y in years:
        denom = series.flow(class_b, y)
        if denom:
            ratios[y] = series.flow(class_a, y) / denom
    return ratios


def crossover_year(series: ClassFlowSeries, class_a: str, class_b: str) -> int | None:
    """First year from which class_b's flow permanently exceeds class_a's.

    Considering the years where either class has an entry (missing entries
    count as zero): the result is one past the last year in which class_a
    held on (flow_a >= flow_b), provided at least one later observed year
    exists and every one of them has flow_b strictly ahead. None when
    class_b never trailed (no prior regime) or still trails at the end.
    """
    years = sorted(
        {y for cls, y in series.entries if cls in (class_a, class_b)}
    )
    if not years:
        return None
    held = [y for y in years if series.flow(class_a, y) >= series.flow(class_b, y)]
    if not held:
        return None
    last_held = held[-1]
    if last_held == years[-1]:
        return None
    return last_held + 1


@dataclass(frozen=True)
class ExclusionSet:
    """Nodes removed for an assignee: theirs, their citers, their cited.

    The three index arrays are disjoint; a node that both cites and is
    cited by the assignee's patents is tagged cites-owned.
    """

    assignee: str
    owned: np.ndarray
    cites_owned: np.ndarray
    cited_by_owned: np.ndarray

    @property
    def excluded(self) -> np.ndarray:
        return np.sort(np.concatenate((self.owned, self.cites_owned, self.cited_by_owned)))

    def reasons(self) -> dict[int, str]:
        tags: dict[int, str] = {}
        for arr, tag in (
            (self.owned, REASON_OWNED),
            (self.cites_owned, REASON_CITES_OWNED),
            (self.cited_by_owned, REASON_CITED_BY_OWNED),
        ):
            for u in arr:
                tags[int(u)] = tag
        return tags

    def report(self) -> dict:
        return {
            "assignee": self.assignee,
            "owned": int(self.owned.size),
            "cites_owned": int(self.cites_owned.size),
            "cited_by_owned": int(self.cited_by_owned.size),
            "excluded_total": int(
                self.owned.size + self.cites_owned.size + self.cited_by_owned.size
            ),
        }


def _normalize_assignee(name: str) -> str:
    return name.strip().casefold()


def assignee_exclusion_set(dataset: PatentDataset, assignee: str) -> ExclusionSet:
    """Compute the assignee's neighborhood: owned patents plus every
    non-owned patent that cites or is cited by one of them."""
    key = _normalize_assignee(assignee)
    n = dataset.node_count
    owned_mask = np.fromiter(
        (_normalize_assignee(m.assignee) == key for m in dataset.meta),
        dtype=bool,
        count=n,
    )
    graph = dataset.graph
    src = np.repeat(np.arange(n, dtype=np.int64), graph.out_degrees)
    dst = graph.out_indices
    cites = np.unique(src[owned_mask[dst] & ~owned_mask[src]])
    cited = np.unique(dst[owned_mask[src] & ~owned_mask[dst]])
    cited = np.setdiff1d(cited, cites, assume_unique=True)
    return ExclusionSet(
        assignee=assignee,
        owned=np.flatnonzero(owned_mask),
        cites_owned=cites,
        cited_by_owned=cited,
    )


def apply_exclusion(
    dataset: PatentDataset, exclusion: ExclusionSet
) -> tuple[PatentDataset, np.ndarray]:
    """Dataset restricted to non-excluded nodes, plus the old-to-new remap."""
    n = dataset.node_count
    keep_mask = np.ones(n, dtype=bool)
    excluded = exclusion.excluded
    keep_mask[excluded] = False
    keep = np.flatnonzero(keep_mask)
    sub, remap = induced_subgraph(dataset.graph, keep)
    meta = tuple(dataset.meta[int(i)] for i in keep)
    ids = tuple(m.patent_id for m in meta)
    report = DatasetBuildReport(
        nodes=sub.node_count,
        edges_stored=sub.build_report.edges_stored,
        placeholder_nodes=sum(
            1 for m in meta if not m.class_known and not m.year_known and not m.assignee
        ),
    )
    reduced = PatentDataset(
        graph=sub,
        meta=meta,
        index_to_id=ids,
        id_to_index={pid: i for i, pid in enumerate(ids)},
        build_report=report,
    )
    return reduced, remap


def excluded_flow_pipeline(
    dataset: PatentDataset,
    assignee: str,
    target_class: str,
    params: PageRankParams,
    metric: str = METRIC_PAGERANK_SUM,
    threads: int = 1,
) -> ClassFlowSeries:
    """Inflow series recomputed on the assignee-excluded subset.

    The graph is reduced first and PageRank is recomputed on it, so the
    scores reflect the reduced citation structure rather than the full
    network's.
    """
    exclusion = assignee_exclusion_set(dataset, assignee)
    reduced, _ = apply_exclusion(dataset, exclusion)
    if reduced.node_count == 0:
        raise PatentFlowError(
            f"excluding assignee {assignee!r} leaves an empty graph"
        )
    result = pagerank(reduced.graph, params, threads=threads)
    return class_inflow_series(reduced, result, target_class, metric)


def write_flow_csv(series_list, path: str | os.PathLike) -> None:
    """Write one or more series as ``target_class,source_class,year,metric,value``.

    Rows within a series are sorted by (source_class, year); count values
    are written as integers and pagerank sums with 17 significant digits.
    """
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["target_class", "source_class", "year", "metric", "value"])
        for series in series_list:
            for cls, year in sorted(series.entries):
                value = series.entries[(cls, year)]
                text = str(value) if series.metric == METRIC_CITATION_COUNT else f"{value:.17g}"
                writer.writerow([series.target_class, cls, year, series.metric, text])
