"""Parse citation and patent metadata files and assemble datasets.

Input formats (UTF-8, one record per line, ``#`` starts a comment line):

* citations.tsv:  ``citing_id<TAB>cited_id``
* patents.tsv:    ``patent_id<TAB>class<TAB>year<TAB>assignee``

Parsing never aborts on a bad line; anomalies are skipped or repaired and
counted in per-stream reports. Unknown years are stored as ``None`` and an
unknown class is the empty string; both keep the patent in the graph but
drop it from class-level aggregations.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import IO, Iterable

from .graph import CitationGraph, build_graph

YEAR_MIN = 1790
YEAR_MAX = 2100


@dataclass(frozen=True, slots=True)
class PatentMeta:
    """Per-patent metadata. Empty class/assignee and None year mean unknown."""

    patent_id: str
    primary_class: str = ""
    grant_year: int | None = None
    assignee: str = ""

    @property
    def class_known(self) -> bool:
        return self.primary_class != ""

    @property
    def year_known(self) -> bool:
        return self.grant_year is not None


@dataclass(frozen=True)
class CitationParseReport:
    lines: int = 0
    edges: int = 0
    blank: int = 0
    comments: int = 0
    malformed: int = 0


@dataclass(frozen=True)
class MetadataParseReport:
    lines: int = 0
    records: int = 0
    blank: int = 0
    comments: int = 0
    malformed: int = 0
    duplicate_ids: int = 0
    unknown_years: int = 0


@dataclass(frozen=True)
class DatasetBuildReport:
    """Counts of everything dropped or repaired on the way to a dataset."""

    nodes: int = 0
    edges_stored: int = 0
    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0
    placeholder_nodes: int = 0
    citations: CitationParseReport | None = None
    metadata: MetadataParseReport | None = None

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if d["citations"] is None:
            d.pop("citations")
        if d["metadata"] is None:
            d.pop("metadata")
        return d


@dataclass(frozen=True)
class PatentDataset:
    """A citation graph joined to per-node metadata and an id mapping."""

    graph: CitationGraph
    meta: tuple[PatentMeta, ...]
    index_to_id: tuple[str, ...]
    id_to_index: dict[str, int] = field(repr=False)
    build_report: DatasetBuildReport = field(default_factory=DatasetBuildReport)

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def index_of(self, patent_id: str) -> int | None:
        return self.id_to_index.get(patent_id)


def _iter_lines(stream: Iterable[str] | IO[str]) -> Iterable[str]:
    for raw in stream:
        yield raw.rstrip("\r\n")


def parse_citations(stream: Iterable[str] | IO[str]) -> tuple[list[tuple[str, str]], CitationParseReport]:
    """Read citing/cited id pairs, skipping and counting bad lines."""
    edges: list[tuple[str, str]] = []
    lines = blank = comments = malformed = 0
    for line in _iter_lines(stream):
        lines += 1
        if not line.strip():
            blank += 1
            continue
        if line.startswith("#"):
            comments += 1
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            malformed += 1
            continue
        citing, cited = parts[0].strip(), parts[1].strip()
        if not citing or not cited:
            malformed += 1
            continue
        edges.append((citing, cited))
    report = CitationParseReport(
        lines=lines, edges=len(edges), blank=blank, comments=comments, malformed=malformed
    )
    return edges, report


def _parse_year(text: str) -> int | None:
    text = text.strip()
    if not text:
        return None
    try:
        year = int(text)
    except ValueError:
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        return None
    return year


def parse_metadata(stream: Iterable[str] | IO[str]) -> tuple[list[PatentMeta], MetadataParseReport]:
    """Read patent metadata records.

    Duplicate ids keep the last record (at the first record's position).
    A year that is missing, non-numeric, or outside [1790, 2100] is stored
    as unknown and counted.
    """
    records: list[PatentMeta] = []
    position: dict[str, int] = {}
    lines = blank = comments = malformed = duplicates = unknown_years = 0
    for line in _iter_lines(stream):
        lines += 1
        if not line.strip():
            blank += 1
            continue
        if line.startswith("#"):
            comments += 1
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            malformed += 1
            continue
        patent_id = parts[0].strip()
        if not patent_id:
            malformed += 1
            continue
        year = _parse_year(parts[2])
        if year is None:
            unknown_years += 1
        meta = PatentMeta(
            patent_id=patent_id,
            primary_class=parts[1].strip(),
            grant_year=year,
            assignee=parts[3].strip(),
        )
        if patent_id in position:
            duplicates += 1
            records[position[patent_id]] = meta
        else:
            position[patent_id] = len(records)
            records.append(meta)
    report = MetadataParseReport(
        lines=lines,
        records=len(records),
        blank=blank,
        comments=comments,
        malformed=malformed,
        duplicate_ids=duplicates,
        unknown_years=unknown_years,
    )
    return records, report


def assemble_dataset(
    edges: Iterable[tuple[str, str]],
    metas: Iterable[PatentMeta],
    citations_report: CitationParseReport | None = None,
    metadata_report: MetadataParseReport | None = None,
) -> PatentDataset:
    """Join parsed edges and metadata into a dataset.

    Node indices follow first appearance: metadata records in order, then
    ids seen only in edges (these get placeholder metadata and are counted).
    """
    metas = list(metas)
    id_to_index: dict[str, int] = {}
    meta_list: list[PatentMeta] = []
    for meta in metas:
        if meta.patent_id in id_to_index:
            # defensive: parse_metadata already deduplicates
            meta_list[id_to_index[meta.patent_id]] = meta
            continue
        id_to_index[meta.patent_id] = len(meta_list)
        meta_list.append(meta)

    edge_index: list[tuple[int, int]] = []
    placeholders = 0
    for citing, cited in edges:
        pair = []
        for pid in (citing, cited):
            idx = id_to_index.get(pid)
            if idx is None:
                idx = len(meta_list)
                id_to_index[pid] = idx
                meta_list.append(PatentMeta(patent_id=pid))
                placeholders += 1
            pair.append(idx)
        edge_index.append((pair[0], pair[1]))

    graph = build_graph(edge_index, len(meta_list))
    report = DatasetBuildReport(
        nodes=len(meta_list),
        edges_stored=graph.build_report.edges_stored,
        self_loops_dropped=graph.build_report.self_loops_dropped,
        duplicate_edges_dropped=graph.build_report.duplicate_edges_dropped,
        placeholder_nodes=placeholders,
        citations=citations_report,
        metadata=metadata_report,
    )
    return PatentDataset(
        graph=graph,
        meta=tuple(meta_list),
        index_to_id=tuple(m.patent_id for m in meta_list),
        id_to_index=id_to_index,
        build_report=report,
    )


def load_dataset(citations_path: str | os.PathLike, patents_path: str | os.PathLike) -> PatentDataset:
    """Parse both files and assemble a dataset with a combined build report."""
    with open(citations_path, encoding="utf-8") as f:
        edges, cit_report = parse_citations(f)
    with open(patents_path, encoding="utf-8") as f:
        metas, meta_report = parse_metadata(f)
    return assemble_dataset(edges, metas, cit_report, meta_report)


def write_citations(dataset: PatentDataset, path: str | os.PathLike) -> None:
    """Serialize stored edges back to the citations.tsv format."""
    g = dataset.graph
    ids = dataset.index_to_id
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u in range(g.node_count):
            citing = ids[u]
            for v in g.out_neighbors(u):
                f.write(f"{citing}\t{ids[v]}\n")


def write_metadata(dataset: PatentDataset, path: str | os.PathLike) -> None:
    """Serialize metadata back to the patents.tsv format, in index order."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for m in dataset.meta:
            year = "" if m.grant_year is None else str(m.grant_year)
            f.write(f"{m.patent_id}\t{m.primary_class}\t{year}\t{m.assignee}\n")
