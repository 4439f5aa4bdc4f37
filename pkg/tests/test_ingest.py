import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patentflow import (
    PatentMeta,
    assemble_dataset,
    load_dataset,
    parse_citations,
    parse_metadata,
    write_citations,
    write_metadata,
)


def test_parse_citations_basic():
    edges, report = parse_citations(io.StringIO("4683202\t4683195\n"))
    assert edges == [("4683202", "4683195")]
    assert report.edges == 1
    assert report.malformed == 0


def test_parse_citations_comment_and_blank():
    edges, report = parse_citations(io.StringIO("# header\n\n"))
    assert edges == []
    assert report.comments == 1
    assert report.blank == 1


def test_parse_citations_malformed_line_skipped():
    edges, report = parse_citations(io.StringIO("a\tb\nc\n"))
    assert edges == [("a", "b")]
    assert report.malformed == 1


@pytest.mark.parametrize("line", ["a\t\n", "\tb\n", "a\tb\tc\n"])
def test_parse_citations_rejects_bad_fields(line):
    edges, report = parse_citations(io.StringIO(line))
    assert edges == []
    assert report.malformed == 1


def test_parse_metadata_basic():
    metas, report = parse_metadata(io.StringIO("4723129\t347\t1988\tCanon\n"))
    assert metas == [
        PatentMeta(patent_id="4723129", primary_class="347", grant_year=1988, assignee="Canon")
    ]
    assert report.records == 1


def test_parse_metadata_missing_fields():
    metas, report = parse_metadata(io.StringIO("x\t435\t\t\n"))
    (m,) = metas
    assert m.primary_class == "435"
    assert m.grant_year is None
    assert m.assignee == ""
    assert report.unknown_years == 1


def test_parse_metadata_duplicate_last_wins():
    text = "x\t100\t1999\tfirst\nx\t200\t2001\tsecond\n"
    metas, report = parse_metadata(io.StringIO(text))
    (m,) = metas
    assert m.primary_class == "200"
    assert m.assignee == "second"
    assert report.duplicate_ids == 1


@pytest.mark.parametrize("year", ["notayear", "1492", "2525"])
def test_parse_metadata_bad_year_kept_unknown(year):
    metas, report = parse_metadata(io.StringIO(f"x\t435\t{year}\tacme\n"))
    assert metas[0].grant_year is None
    assert report.unknown_years == 1


def test_assemble_both_endpoints_known():
    ds = assemble_dataset(
        [("a", "b")],
        [PatentMeta("a", "100", 2000, ""), PatentMeta("b", "200", 1999, "")],
    )
    assert ds.node_count == 2
    assert ds.build_report.placeholder_nodes == 0
    assert ds.graph.edge_count == 1


def test_assemble_placeholders_for_unknown_ids():
    ds = assemble_dataset([("a", "b")], [])
    assert ds.node_count == 2
    assert ds.build_report.placeholder_nodes == 2
    assert ds.meta[0].patent_id == "a"
    assert not ds.meta[0].class_known
    assert not ds.meta[0].year_known


def test_assemble_id_map_bijection():
    ds = assemble_dataset(
        [("a", "b"), ("c", "a")],
        [PatentMeta("b", "100", 2000, "acme")],
    )
    assert len(ds.id_to_index) == ds.node_count == len(ds.index_to_id)
    for pid, idx in ds.id_to_index.items():
        assert ds.index_to_id[idx] == pid
        assert ds.meta[idx].patent_id == pid


def _recount_oracle(citation_lines, metadata_lines):
    """Independent tally over the raw text, no ingest code involved."""
    ids = set()
    pairs = set()
    for line in metadata_lines:
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 4 and parts[0].strip():
            ids.add(parts[0].strip())
    for line in citation_lines:
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            continue
        a, b = parts[0].strip(), parts[1].strip()
        if a and b:
            ids.add(a)
            ids.add(b)
            if a != b:
                pairs.add((a, b))
    return len(ids), len(pairs)


def test_ten_thousand_line_fixture_matches_recount(tmp_path):
    import numpy as np

    rng = np.random.default_rng(11)
    cit_lines = ["# synthetic fixture\n"]
    for _ in range(6000):
        r = rng.random()
        a, b = rng.integers(0, 1800, size=2)
        if r < 0.02:
            cit_lines.append(f"only_one_field_{a}\n")
        elif r < 0.04:
            cit_lines.append("\n")
        else:
            cit_lines.append(f"n{a}\tn{b}\n")
    meta_lines = []
    for i in range(4000):
        year = 1980 + int(rng.integers(0, 30))
        if rng.random() < 0.03:
            meta_lines.append(f"n{i}\tbadline\n")
        else:
            meta_lines.append(f"n{i}\t{int(rng.integers(100, 105))}\t{year}\tco{int(rng.integers(5))}\n")

    citations = tmp_path / "citations.tsv"
    patents = tmp_path / "patents.tsv"
    citations.write_text("".join(cit_lines), encoding="utf-8")
    patents.write_text("".join(meta_lines), encoding="utf-8")

    ds = load_dataset(citations, patents)
    nodes, edges = _recount_oracle(cit_lines, meta_lines)
    assert ds.node_count == nodes
    assert ds.graph.edge_count == edges


ids_st = st.text(alphabet="abcdefgh0123456789", min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(ids_st, ids_st), max_size=30),
    st.lists(
        st.tuples(
            ids_st,
            st.sampled_from(["", "100", "200"]),
            st.one_of(st.none(), st.integers(1980, 2020)),
            st.sampled_from(["", "acme", "globex"]),
        ),
        max_size=20,
        unique_by=lambda t: t[0],
    ),
)
def test_round_trip(tmp_path_factory, edges, metas):
    records = [PatentMeta(*m) for m in metas]
    ds = assemble_dataset(edges, records)
    tmp = tmp_path_factory.mktemp("roundtrip")
    write_citations(ds, tmp / "c.tsv")
    write_metadata(ds, tmp / "p.tsv")
    ds2 = load_dataset(tmp / "c.tsv", tmp / "p.tsv")
    assert ds2.index_to_id == ds.index_to_id
    assert ds2.id_to_index == ds.id_to_index
    assert ds2.meta == ds.meta
    import numpy as np

    assert np.array_equal(ds2.graph.out_indptr, ds.graph.out_indptr)
    assert np.array_equal(ds2.graph.out_indices, ds.graph.out_indices)


def test_node_count_is_union_of_ids():
    ds = assemble_dataset(
        [("a", "b"), ("b", "c")],
        [PatentMeta("c", "100", 2000, ""), PatentMeta("d", "200", 2001, "")],
    )
    assert ds.node_count == 4
