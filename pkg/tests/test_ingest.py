"""Ingestion: JSONL parsing, graph application, reports, and adapters."""

from __future__ import annotations

import json

import pytest

from qic.errors import AdapterError, InvalidMetadataError, UnknownAdapterError
from qic.graph import DATA_OBJECT, INSTITUTION, RESEARCHER, KnowledgeGraph
from qic.ingest import (
    ADAPTERS,
    RecordStreams,
    apply,
    bundled_personas_dir,
    fetch_from_source,
    ingest_files,
    ingest_source,
    ingest_streams,
    parse_records,
    register_adapter,
)


def object_line(object_id="doi:10.5555/x", researcher="orcid:a", institution="ror:inst-1", **extra):
    record = {
        "schema": "data_object@1",
        "id": object_id,
        "title": "a dataset",
        "repository": "repo:nine",
        "published": "2023-01-01",
        "contributors": [{"researcher_id": researcher, "institution_id": institution}],
        "metadata": {"identifier_scheme": "doi", "license_id": "CC0-1.0"},
    }
    record.update(extra)
    return json.dumps(record)


def event_line(object_id="doi:10.5555/x", source_id="doi:10.1234/c", **extra):
    record = {
        "schema": "reuse_event@1",
        "data_object_id": object_id,
        "kind": "citation",
        "source_id": source_id,
        "occurred": "2024-01-01",
    }
    record.update(extra)
    return json.dumps(record)


def override_line(object_id="doi:10.5555/x", **extra):
    record = {
        "schema": "curator_override@1",
        "object_id": object_id,
        "dimension": "R",
        "value": 0.9,
        "curator_id": "curator:lee",
        "timestamp": "2024-04-02T09:30:00Z",
    }
    record.update(extra)
    return json.dumps(record)


# -- parsing -------------------------------------------------------------------


def test_parse_valid_object_lines():
    lines = [object_line(object_id=f"doi:10.5555/x{k}") for k in range(3)]
    records, rejections = parse_records(lines, "data_object")
    assert [r.id for r in records] == ["doi:10.5555/x0", "doi:10.5555/x1", "doi:10.5555/x2"]
    assert rejections == []
    assert records[0].metadata.identifier_scheme == "doi"
    assert records[0].contributors[0].researcher_id == "orcid:a"


def test_parse_rejects_each_line_kind_with_a_reason():
    lines = [
        "",  # blank
        "{not json",  # malformed
        "[1, 2]",  # not an object
        json.dumps({"schema": "data_object@2", "id": "doi:x"}),  # wrong schema
        object_line(contributors=[]),  # fails field validation
        object_line(),  # valid
    ]
    records, rejections = parse_records(lines, "data_object", source="feed.jsonl")
    assert len(records) == 1
    assert len(rejections) == 5
    assert len(records) + len(rejections) == len(lines)  # conservation
    reasons = {r.line_no: r.reason for r in rejections}
    assert reasons[1] == "blank line"
    assert "invalid JSON" in reasons[2]
    assert "JSON object" in reasons[3]
    assert "schema" in reasons[4]
    assert "contributors" in reasons[5]
    assert all(r.source == "feed.jsonl" for r in rejections)
    assert "feed.jsonl line 1:" in rejections[0].message


def test_parse_preserves_unknown_fields_as_extras():
    line = object_line(color="teal", metadata={"identifier_scheme": "doi", "mood": "sunny"})
    records, rejections = parse_records([line], "data_object")
    assert rejections == []
    assert records[0].extras["color"] == "teal"
    assert records[0].extras["metadata"] == {"mood": "sunny"}
    assert records[0].metadata.identifier_scheme == "doi"


def test_parse_event_validation():
    lines = [
        event_line(),
        event_line(kind="remix"),
        event_line(weight_override=-2.0),
        event_line(occurred="not-a-date"),
        event_line(source_id="bare-name"),
    ]
    records, rejections = parse_records(lines, "reuse_event")
    assert len(records) == 1
    assert {r.line_no for r in rejections} == {2, 3, 4, 5}


def test_parse_override_validation():
    lines = [
        override_line(),
        override_line(dimension="Q"),
        override_line(value=2.0),
        override_line(timestamp="never"),
        override_line(curator_id=""),
    ]
    records, rejections = parse_records(lines, "curator_override")
    assert len(records) == 1
    assert {r.line_no for r in rejections} == {2, 3, 4, 5}


def test_parse_rejects_unknown_record_type():
    with pytest.raises(InvalidMetadataError):
        parse_records([], "mystery")


# -- application ----------------------------------------------------------------


def test_apply_builds_nodes_and_edges():
    graph = KnowledgeGraph()
    records, _ = parse_records([object_line()], "data_object")
    report = apply(records, graph)
    assert report.counts["data_object"].accepted == 1
    assert graph.node("doi:10.5555/x").kind == DATA_OBJECT
    assert graph.node("orcid:a").kind == RESEARCHER
    assert graph.node("ror:inst-1").kind == INSTITUTION
    assert graph.contributors_of("doi:10.5555/x") == ("orcid:a",)
    counts = graph.collaboration_counts("doi:10.5555/x")
    assert (counts.n_authors, counts.n_institutions) == (1, 1)
    assert graph.node("doi:10.5555/x").attributes["metadata"]["identifier_scheme"] == "doi"


def test_replay_deduplicates_and_leaves_checksum_unchanged():
    graph = KnowledgeGraph()
    streams = dict(
        object_streams=[("objects", [object_line()])],
        event_streams=[("events", [event_line()])],
        override_streams=[("overrides", [override_line()])],
    )
    first = ingest_streams(graph, **streams)
    assert first.total_rejected == 0
    assert first.counts["data_object"].accepted == 1
    assert first.counts["reuse_event"].accepted == 1
    assert first.counts["curator_override"].accepted == 1
    checksum = graph.checksum()

    second = ingest_streams(graph, **streams)
    assert second.counts["data_object"].deduplicated == 1
    assert second.counts["reuse_event"].deduplicated == 1
    assert second.counts["curator_override"].deduplicated == 1
    assert second.counts["data_object"].accepted == 0
    assert graph.checksum() == checksum


def test_event_for_unknown_object_rejected_not_fatal():
    graph = KnowledgeGraph()
    report = ingest_streams(
        graph,
        object_streams=[("objects", [object_line()])],
        event_streams=[("events", [event_line(object_id="doi:10.5555/ghost"), event_line()])],
    )
    assert report.counts["reuse_event"].accepted == 1
    assert report.counts["reuse_event"].rejected == 1
    assert "unknown data object" in report.rejections[0].reason
    assert len(graph.reuse_events("doi:10.5555/x")) == 1


def test_override_for_unknown_object_rejected():
    graph = KnowledgeGraph()
    report = ingest_streams(graph, override_streams=[("overrides", [override_line()])])
    assert report.counts["curator_override"].rejected == 1
    assert "unknown data object" in report.rejections[0].reason


def test_record_reusing_one_id_in_two_roles_rejected_atomically():
    graph = KnowledgeGraph()
    twisted = object_line(institution="doi:10.5555/x")  # object id doubling as institution
    report = ingest_streams(graph, object_streams=[("objects", [twisted])])
    assert report.counts["data_object"].rejected == 1
    assert "both as" in report.rejections[0].reason
    assert graph.node_count == 0  # nothing was half-applied


def test_colliding_node_kinds_across_records_rejected():
    graph = KnowledgeGraph()
    report = ingest_streams(
        graph,
        object_streams=[("objects", [object_line()])],
        event_streams=[("events", [event_line(source_id="orcid:a")])],
    )
    assert report.counts["reuse_event"].rejected == 1
    assert "already exists as" in report.rejections[0].reason


def test_events_may_reference_objects_from_the_same_batch():
    graph = KnowledgeGraph()
    report = ingest_streams(
        graph,
        object_streams=[("objects", [object_line()])],
        event_streams=[("events", [event_line()])],
    )
    assert report.total_rejected == 0


def test_report_totals_reconcile_with_input_lines():
    graph = KnowledgeGraph()
    object_lines = [object_line(), object_line(), "", "{broken"]
    report = ingest_streams(graph, object_streams=[("objects", object_lines)])
    counts = report.counts["data_object"]
    assert counts.accepted == 1
    assert counts.deduplicated == 1
    assert counts.rejected == 2
    assert counts.total == len(object_lines)


def test_report_serialization_shapes():
    graph = KnowledgeGraph()
    report = ingest_streams(graph, object_streams=[("objects", [object_line(), ""])])
    data = report.to_dict()
    assert data["counts"]["data_object"] == {
        "accepted": 1,
        "deduplicated": 0,
        "rejected": 1,
        "total": 2,
    }
    assert data["rejections"][0]["reason"] == "blank line"
    table = report.to_table()
    assert "data_object" in table and "blank line" in table


def test_ingest_files_reads_paths_and_raises_on_missing(tmp_path):
    objects = tmp_path / "objects.jsonl"
    objects.write_text(object_line() + "\n", encoding="utf-8")
    graph = KnowledgeGraph()
    report = ingest_files(graph, object_paths=[objects])
    assert report.counts["data_object"].accepted == 1
    assert report.rejections == ()
    with pytest.raises(OSError):
        ingest_files(KnowledgeGraph(), object_paths=[tmp_path / "missing.jsonl"])


# -- adapters ---------------------------------------------------------------------


def test_fixture_adapter_replays_bundled_personas():
    graph = KnowledgeGraph()
    report = ingest_source(graph, "fixture")
    assert report.total_rejected == 0
    assert report.counts["data_object"].accepted == 4
    assert report.counts["reuse_event"].accepted == 275
    assert report.counts["curator_override"].accepted == 2
    assert bundled_personas_dir().is_dir()


def test_fixture_adapter_reads_custom_directory(tmp_path):
    (tmp_path / "objects.jsonl").write_text(object_line() + "\n", encoding="utf-8")
    streams = fetch_from_source("fixture", {"path": str(tmp_path)})
    assert len(streams.objects) == 1
    assert streams.events == ()  # missing files mean empty streams
    report = ingest_source(KnowledgeGraph(), "fixture", {"path": str(tmp_path)})
    assert report.counts["data_object"].accepted == 1


def test_fixture_adapter_rejects_nondirectory(tmp_path):
    file_path = tmp_path / "objects.jsonl"
    file_path.write_text("", encoding="utf-8")
    with pytest.raises(AdapterError):
        fetch_from_source("fixture", {"path": str(file_path)})


@pytest.mark.parametrize("name", ["datacite", "usage-stats"])
def test_live_adapters_are_declared_stubs(name):
    with pytest.raises(AdapterError, match="stub"):
        fetch_from_source(name)


def test_unknown_adapter_lists_registered_names():
    with pytest.raises(UnknownAdapterError, match="fixture"):
        fetch_from_source("crossref")


def test_register_adapter_extends_the_registry():
    def fetch(config):
        return RecordStreams(origin="inline", objects=(object_line(),))

    register_adapter("inline-test", fetch)
    try:
        report = ingest_source(KnowledgeGraph(), "inline-test")
        assert report.counts["data_object"].accepted == 1
    finally:
        del ADAPTERS["inline-test"]
