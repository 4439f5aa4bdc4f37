"""PageRank and temporal class-flow analysis for patent citation networks."""

from .errors import MalformedEdgeError, PatentFlowError
from .graph import CitationGraph, GraphBuildReport, build_graph, induced_subgraph
from .ingest import (
    DatasetBuildReport,
    PatentDataset,
    PatentMeta,
    assemble_dataset,
    load_dataset,
    parse_citations,
    parse_metadata,
    write_citations,
    write_metadata,
)
from .pagerank import (
    PageRankParams,
    PageRankResult,
    convergence_delta,
    pagerank,
    pagerank_sweep,
    write_scores_tsv,
)
from .reports import RankRow, RankTable, render_rank_table, top_table, write_rank_csv
from .testkit import (
    EdgeModel,
    PlantedCrossover,
    SyntheticSpec,
    dense_pagerank,
    generate_synthetic_dataset,
    load_spec,
    random_citation_edges,
    random_graph,
)
from .trends import (
    ClassFlowSeries,
    ExclusionSet,
    apply_exclusion,
    assignee_exclusion_set,
    class_inflow_series,
    class_ratio,
    crossover_year,
    excluded_flow_pipeline,
    patent_inflow_breakdown,
    write_flow_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CitationGraph",
    "ClassFlowSeries",
    "DatasetBuildReport",
    "EdgeModel",
    "ExclusionSet",
    "GraphBuildReport",
    "MalformedEdgeError",
    "PageRankParams",
    "PageRankResult",
    "PatentDataset",
    "PatentFlowError",
    "PatentMeta",
    "PlantedCrossover",
    "RankRow",
    "RankTable",
    "SyntheticSpec",
    "apply_exclusion",
    "assemble_dataset",
    "assignee_exclusion_set",
    "build_graph",
    "class_inflow_series",
    "class_ratio",
    "convergence_delta",
    "crossover_year",
    "dense_pagerank",
    "excluded_flow_pipeline",
    "generate_synthetic_dataset",
    "induced_subgraph",
    "load_dataset",
    "load_spec",
    "pagerank",
    "pagerank_sweep",
    "parse_citations",
    "parse_metadata",
    "patent_inflow_breakdown",
    "random_citation_edges",
    "random_graph",
    "render_rank_table",
    "top_table",
    "write_citations",
    "write_flow_csv",
    "write_metadata",
    "write_rank_csv",
    "write_scores_tsv",
]
