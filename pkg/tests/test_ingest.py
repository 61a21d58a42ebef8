import io
import json

import pytest
from hypothesis import given, strategies as st

from citeprof.ingest import (
    CitationSeries,
    IngestError,
    PaperRecord,
    UnknownPaperError,
    build_graph,
    extract_series,
    parse_dataset,
    write_csv,
    write_jsonl,
)

GOOD_JSONL = """\
{"id": "a", "year": 1990, "venue_type": "journal", "references": ["b", "b", "a"]}
{"id": "b", "year": 1985, "authors": ["au1", "au2"]}

{"id": "c", "year": 1991, "references": ["a", "ghost"]}
"""


def test_parse_jsonl_basic():
    records, report = parse_dataset(GOOD_JSONL)
    assert [r.paper_id for r in records] == ["a", "b", "c"]
    assert report.n_records == 3
    assert report.n_rejected == 0
    # duplicate and self references are cleaned per record
    a = records[0]
    assert a.reference_ids == ("b",)
    assert report.dropped_duplicate_references == 1
    assert report.dropped_self_references == 1


@pytest.mark.parametrize(
    "line, reason",
    [
        ('{"year": 1990}', "missing id"),
        ('{"id": "", "year": 1990}', "missing id"),
        ('{"id": "x", "year": "whenever"}', "bad year"),
        ('{"id": "x", "year": 1600}', "bad year"),
        ('{"id": "x", "year": 1990, "venue_type": "blog"}', "bad venue_type"),
        ("{not json", "malformed json"),
        ('["a", "list"]', "malformed json"),
    ],
)
def test_parse_jsonl_rejections(line, reason):
    records, report = parse_dataset(line)
    assert records == []
    assert report.reject_reasons == {reason: 1}


def test_duplicate_ids_rejected_with_line_numbers():
    text = '{"id": "a", "year": 1990}\n{"id": "a", "year": 1991}\n'
    records, report = parse_dataset(text)
    assert len(records) == 1
    assert report.rejected == [(2, "duplicate id")]


def test_year_window_configurable():
    records, report = parse_dataset('{"id": "a", "year": 1600}', year_window=(1500, 1700))
    assert len(records) == 1


def test_unknown_format_fatal():
    with pytest.raises(IngestError):
        parse_dataset("", format="xml")


def test_csv_roundtrip():
    records, _ = parse_dataset(GOOD_JSONL)
    buf = io.StringIO()
    write_csv(records, buf)
    back, report = parse_dataset(buf.getvalue(), format="csv")
    assert back == records
    assert report.n_rejected == 0


def test_jsonl_roundtrip_and_bytes_input():
    records, _ = parse_dataset(GOOD_JSONL)
    buf = io.StringIO()
    write_jsonl(records, buf)
    back, _ = parse_dataset(buf.getvalue().encode("utf-8"))
    assert back == records


record_strategy = st.builds(
    PaperRecord,
    paper_id=st.text(st.characters(min_codepoint=48, max_codepoint=122), min_size=1, max_size=8),
    year=st.integers(min_value=1900, max_value=2100),
    venue_type=st.sampled_from(["conference", "journal", "unknown"]),
    fields=st.tuples(st.sampled_from(["ai", "db", "net"])),
    author_ids=st.tuples(st.sampled_from(["u", "v", "w"])),
    reference_ids=st.just(()),
)


@given(st.lists(record_strategy, max_size=20, unique_by=lambda r: r.paper_id))
def test_jsonl_roundtrip_property(records):
    buf = io.StringIO()
    write_jsonl(records, buf)
    back, report = parse_dataset(buf.getvalue())
    assert back == records
    assert report.n_rejected == 0


def test_graph_edges_and_dangling():
    records, _ = parse_dataset(GOOD_JSONL)
    graph = build_graph(records)
    assert len(graph) == 3
    assert set(graph.edges()) == {("a", "b"), ("c", "a")}
    assert graph.dangling_dropped == 1  # "ghost"
    assert graph.in_degree("a") == 1
    assert graph.in_citers("b") == ("a",)
    assert graph.out_references("c") == ("a",)


def test_graph_edge_set_is_order_independent():
    records, _ = parse_dataset(GOOD_JSONL)
    forward = build_graph(records)
    backward = build_graph(list(reversed(records)))
    assert list(forward.edges()) == list(backward.edges())


def test_strict_chronology_drops_time_travel():
    records = [
        PaperRecord(paper_id="old", year=1990, reference_ids=("new",)),
        PaperRecord(paper_id="new", year=1995),
    ]
    graph = build_graph(records, strict_chronology=True)
    assert graph.n_edges == 0
    assert graph.chronology_dropped == 1
    loose = build_graph(records)
    assert loose.n_edges == 1


def test_duplicate_record_ids_fatal_in_graph():
    records = [PaperRecord("a", 1990), PaperRecord("a", 1991)]
    with pytest.raises(IngestError):
        build_graph(records)


def test_subgraph_upto():
    records, _ = parse_dataset(GOOD_JSONL)
    graph = build_graph(records)
    early = graph.subgraph_upto(1990)
    assert early.node_ids() == ["a", "b"]
    assert set(early.edges()) == {("a", "b")}


def test_extract_series_alignment():
    records = [
        PaperRecord("p", 1980),
        PaperRecord("early", 1979, reference_ids=("p",)),  # before publication
        PaperRecord("same", 1980, reference_ids=("p",)),
        PaperRecord("later", 1983, reference_ids=("p",)),
        PaperRecord("far", 2005, reference_ids=("p",)),  # beyond horizon
    ]
    series = extract_series(build_graph(records), "p", horizon_years=20)
    assert series.pub_year == 1980
    assert series.counts[0] == 1
    assert series.counts[3] == 1
    assert sum(series.counts) == 2
    assert series.total(first_n_years=2) == 1


def test_extract_series_errors():
    graph = build_graph([PaperRecord("p", 1980)])
    with pytest.raises(UnknownPaperError):
        extract_series(graph, "nope")
    with pytest.raises(ValueError):
        extract_series(graph, "p", horizon_years=0)


def test_citation_series_validation():
    with pytest.raises(ValueError):
        CitationSeries("p", 1980, ())
    with pytest.raises(ValueError):
        CitationSeries("p", 1980, (1, -1))
