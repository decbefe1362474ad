"""JSONL record parsing, validation, and application to the graph.

Three record schemas, one JSON object per line, each tagged with an
explicit ``schema`` field:

``data_object@1``      {schema, id, title, repository, published,
                        contributors: [{researcher_id, institution_id?}],
                        metadata: {ObjectMetadata fields}}
``reuse_event@1``      {schema, data_object_id, kind, source_id,
                        occurred, weight_override?}
``curator_override@1`` {schema, object_id, dimension, value,
                        curator_id, timestamp}

Parsing accounts for every input line: a line either becomes a
validated record or a rejection carrying its line number and reason —
nothing is silently dropped, including blank lines. Unknown fields are
kept on the record's ``extras`` but take no part in scoring.

Application walks records in stream order. A record that changes graph
state counts as accepted, an exact replay as deduplicated, and a record
that cannot apply (say, a reuse event for an object the graph has never
seen) as rejected with a reason — one bad record never aborts a batch,
and re-applying the same stream converges: the second pass reports
everything deduplicated and leaves the graph untouched. Reuse events
arriving before their object are rejected on that pass by design;
re-applying them after the object lands converges to the same graph as
any other order.

Source adapters materialize records fully before anything is applied,
so a transport failure surfaces as an error rather than a half-applied
batch. The built-in ``fixture`` adapter replays bundled files (two
persona researchers by default) and keeps every test offline; the
DataCite-style and usage-stats adapters are registered interface stubs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .errors import (
    AdapterError,
    InvalidMetadataError,
    QicError,
    UnknownAdapterError,
)
from .fair import DIMENSIONS, CuratorOverride, ObjectMetadata, parse_timestamp
from .graph import (
    DATA_OBJECT,
    DEDUPLICATED,
    INSTITUTION,
    KnowledgeGraph,
    RESEARCHER,
    REUSE_SOURCE,
    as_date,
)

REUSE_KINDS = ("citation", "derived_dataset", "mention", "download_batch")

OBJECT_SCHEMA = "data_object@1"
EVENT_SCHEMA = "reuse_event@1"
OVERRIDE_SCHEMA = "curator_override@1"

RECORD_SCHEMAS = {
    "data_object": OBJECT_SCHEMA,
    "reuse_event": EVENT_SCHEMA,
    "curator_override": OVERRIDE_SCHEMA,
}

_METADATA_FIELDS = {f.name for f in fields(ObjectMetadata)}

ACCEPTED = "accepted"
REJECTED = "rejected"


def _namespaced(value) -> bool:
    """True for ids like "orcid:0000-..." — a nonempty namespace:suffix."""
    if not isinstance(value, str):
        return False
    prefix, sep, suffix = value.partition(":")
    return bool(prefix) and bool(sep) and bool(suffix)


@dataclass(frozen=True)
class Contributor:
    researcher_id: str
    institution_id: str | None = None


@dataclass(frozen=True)
class DataObjectRecord:
    id: str
    title: str
    repository: str
    published: str
    contributors: tuple[Contributor, ...]
    metadata: ObjectMetadata
    extras: Mapping = field(default_factory=dict)
    line_no: int = 0
    source: str = "<stream>"


@dataclass(frozen=True)
class ReuseEventRecord:
    data_object_id: str
    kind: str
    source_id: str
    occurred: str
    weight_override: float | None = None
    extras: Mapping = field(default_factory=dict)
    line_no: int = 0
    source: str = "<stream>"


@dataclass(frozen=True)
class CuratorOverrideRecord:
    object_id: str
    dimension: str
    value: float
    curator_id: str
    timestamp: str
    extras: Mapping = field(default_factory=dict)
    line_no: int = 0
    source: str = "<stream>"


Record = DataObjectRecord | ReuseEventRecord | CuratorOverrideRecord

_RECORD_TYPE_OF = {
    DataObjectRecord: "data_object",
    ReuseEventRecord: "reuse_event",
    CuratorOverrideRecord: "curator_override",
}


@dataclass(frozen=True)
class Rejection:
    """One refused input line and why."""

    record_type: str
    source: str
    line_no: int
    reason: str

    @property
    def message(self) -> str:
        return f"{self.source} line {self.line_no}: {self.reason}"


@dataclass
class TypeCounts:
    accepted: int = 0
    deduplicated: int = 0
    rejected: int = 0

    @property
    def total(self) -> int:
        return (self.accepted + self.deduplicated) + self.rejected


@dataclass
class IngestReport:
    """Where every input line went: accepted, deduplicated, or rejected."""

    counts: dict[str, TypeCounts] = field(
        default_factory=lambda: {name: TypeCounts() for name in RECORD_SCHEMAS}
    )
    rejections: tuple[Rejection, ...] = ()

    @property
    def total_rejected(self) -> int:
        return sum(c.rejected for c in self.counts.values())

    def to_dict(self) -> dict:
        return {
            "counts": {
                name: {
                    "accepted": c.accepted,
                    "deduplicated": c.deduplicated,
                    "rejected": c.rejected,
                    "total": c.total,
                }
                for name, c in sorted(self.counts.items())
            },
            "rejections": [
                {
                    "record_type": r.record_type,
                    "source": r.source,
                    "line_no": r.line_no,
                    "reason": r.reason,
                }
                for r in self.rejections
            ],
        }

    def to_table(self) -> str:
        lines = [f"{'record type':<18} {'accepted':>9} {'dedup':>9} {'rejected':>9} {'total':>9}"]
        for name, c in sorted(self.counts.items()):
            lines.append(
                f"{name:<18} {c.accepted:>9} {c.deduplicated:>9} {c.rejected:>9} {c.total:>9}"
            )
        for rejection in self.rejections:
            lines.append(f"rejected [{rejection.record_type}] {rejection.message}")
        return "\n".join(lines) + "\n"


# -- line validation ---------------------------------------------------------


def _split_extras(data: Mapping, known: Iterable[str]) -> dict:
    return {k: v for k, v in data.items() if k not in set(known)}


def _require_id(data: Mapping, key: str) -> str:
    value = data.get(key)
    if not _namespaced(value):
        raise InvalidMetadataError(
            f"{key} must be a namespaced id like 'prefix:value', got {value!r}"
        )
    return value


def _require_text(data: Mapping, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise InvalidMetadataError(f"{key} must be a string, got {value!r}")
    return value


def _require_date(data: Mapping, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise InvalidMetadataError(f"{key} must be an ISO-8601 date string, got {value!r}")
    as_date(value)
    return value


def _string_tuple(value, what: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(item, str) for item in value):
        raise InvalidMetadataError(f"{what} must be a list of strings, got {value!r}")
    return tuple(value)


def _metadata_from(data) -> tuple[ObjectMetadata, dict]:
    if not isinstance(data, Mapping):
        raise InvalidMetadataError(f"metadata must be an object, got {data!r}")
    extras = _split_extras(data, _METADATA_FIELDS)
    kwargs: dict = {k: v for k, v in data.items() if k in _METADATA_FIELDS}
    if "keywords" in kwargs:
        kwargs["keywords"] = _string_tuple(kwargs["keywords"], "metadata.keywords")
    if "formats" in kwargs:
        kwargs["formats"] = _string_tuple(kwargs["formats"], "metadata.formats")
    return ObjectMetadata(**kwargs), extras


def metadata_to_attrs(metadata: ObjectMetadata) -> dict:
    """JSON-serializable node-attribute form of object metadata."""
    data = asdict(metadata)
    data["keywords"] = list(metadata.keywords)
    data["formats"] = list(metadata.formats)
    return data


def metadata_from_attrs(data: Mapping) -> ObjectMetadata:
    """Rebuild metadata from node attributes written by `metadata_to_attrs`."""
    metadata, _ = _metadata_from(data)
    return metadata


def _contributors_from(data) -> tuple[Contributor, ...]:
    if not isinstance(data, list) or not data:
        raise InvalidMetadataError("missing contributors (need at least one)")
    out = []
    for k, entry in enumerate(data):
        if not isinstance(entry, Mapping):
            raise InvalidMetadataError(f"contributors[{k}] must be an object, got {entry!r}")
        researcher_id = entry.get("researcher_id")
        if not _namespaced(researcher_id):
            raise InvalidMetadataError(
                f"contributors[{k}].researcher_id must be a namespaced id, got {researcher_id!r}"
            )
        institution_id = entry.get("institution_id")
        if institution_id is not None and not _namespaced(institution_id):
            raise InvalidMetadataError(
                f"contributors[{k}].institution_id must be a namespaced id or null, "
                f"got {institution_id!r}"
            )
        out.append(Contributor(researcher_id=researcher_id, institution_id=institution_id))
    return tuple(out)


def _object_from(data: Mapping, line_no: int, source: str) -> DataObjectRecord:
    metadata, metadata_extras = _metadata_from(data.get("metadata", {}))
    extras = _split_extras(
        data, ("schema", "id", "title", "repository", "published", "contributors", "metadata")
    )
    if metadata_extras:
        extras["metadata"] = metadata_extras
    return DataObjectRecord(
        id=_require_id(data, "id"),
        title=_require_text(data, "title"),
        repository=_require_text(data, "repository"),
        published=_require_date(data, "published"),
        contributors=_contributors_from(data.get("contributors")),
        metadata=metadata,
        extras=extras,
        line_no=line_no,
        source=source,
    )


def _event_from(data: Mapping, line_no: int, source: str) -> ReuseEventRecord:
    kind = data.get("kind")
    if kind not in REUSE_KINDS:
        raise InvalidMetadataError(f"kind must be one of {REUSE_KINDS}, got {kind!r}")
    weight_override = data.get("weight_override")
    if weight_override is not None:
        if (
            not isinstance(weight_override, (int, float))
            or isinstance(weight_override, bool)
            or not math.isfinite(weight_override)
            or weight_override < 0.0
        ):
            raise InvalidMetadataError(
                f"weight_override must be a finite number >= 0, got {weight_override!r}"
            )
        weight_override = float(weight_override)
    return ReuseEventRecord(
        data_object_id=_require_id(data, "data_object_id"),
        kind=kind,
        source_id=_require_id(data, "source_id"),
        occurred=_require_date(data, "occurred"),
        weight_override=weight_override,
        extras=_split_extras(
            data, ("schema", "data_object_id", "kind", "source_id", "occurred", "weight_override")
        ),
        line_no=line_no,
        source=source,
    )


def _override_from(data: Mapping, line_no: int, source: str) -> CuratorOverrideRecord:
    dimension = data.get("dimension")
    if dimension not in DIMENSIONS:
        raise InvalidMetadataError(f"dimension must be one of {DIMENSIONS}, got {dimension!r}")
    value = data.get("value")
    if (
        not isinstance(value, (int, float))
        or isinstance(value, bool)
        or not math.isfinite(value)
        or not 0.0 <= value <= 1.0
    ):
        raise InvalidMetadataError(f"value must lie in [0, 1], got {value!r}")
    curator_id = data.get("curator_id")
    if not isinstance(curator_id, str) or not curator_id:
        raise InvalidMetadataError(f"curator_id must be a nonempty string, got {curator_id!r}")
    timestamp = data.get("timestamp")
    if not isinstance(timestamp, str):
        raise InvalidMetadataError(f"timestamp must be an ISO-8601 string, got {timestamp!r}")
    try:
        parse_timestamp(timestamp)
    except ValueError as exc:
        raise InvalidMetadataError(f"timestamp is not ISO-8601: {exc}")
    return CuratorOverrideRecord(
        object_id=_require_id(data, "object_id"),
        dimension=dimension,
        value=float(value),
        curator_id=curator_id,
        timestamp=timestamp,
        extras=_split_extras(
            data, ("schema", "object_id", "dimension", "value", "curator_id", "timestamp")
        ),
        line_no=line_no,
        source=source,
    )


_BUILDERS: dict[str, Callable[[Mapping, int, str], Record]] = {
    "data_object": _object_from,
    "reuse_event": _event_from,
    "curator_override": _override_from,
}


def parse_records(
    lines: Iterable[str], record_type: str, source: str = "<stream>"
) -> tuple[list[Record], list[Rejection]]:
    """Validate JSONL lines of one record type.

    Every line lands in exactly one of the two result lists; blank
    lines are rejected rather than skipped so the report's totals
    always reconcile with the input.
    """
    if record_type not in RECORD_SCHEMAS:
        raise InvalidMetadataError(
            f"record_type must be one of {sorted(RECORD_SCHEMAS)}, got {record_type!r}"
        )
    expected_schema = RECORD_SCHEMAS[record_type]
    build = _BUILDERS[record_type]
    records: list[Record] = []
    rejections: list[Rejection] = []

    def reject(line_no: int, reason: str) -> None:
        rejections.append(
            Rejection(record_type=record_type, source=source, line_no=line_no, reason=reason)
        )

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            reject(line_no, "blank line")
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            reject(line_no, f"invalid JSON: {exc}")
            continue
        if not isinstance(data, dict):
            reject(line_no, f"record must be a JSON object, got {type(data).__name__}")
            continue
        schema = data.get("schema")
        if schema != expected_schema:
            reject(line_no, f"schema must be {expected_schema!r}, got {schema!r}")
            continue
        try:
            records.append(build(data, line_no, source))
        except QicError as exc:
            reject(line_no, str(exc))
    return records, rejections


# -- application -------------------------------------------------------------


def _kind_check(graph: KnowledgeGraph, node_id: str, kind: str) -> str | None:
    if graph.has_node(node_id) and graph.node(node_id).kind != kind:
        return f"id {node_id!r} already exists as a {graph.node(node_id).kind}, not a {kind}"
    return None


def _apply_object(graph: KnowledgeGraph, record: DataObjectRecord) -> str | None:
    planned: dict[str, str] = {record.id: DATA_OBJECT}
    wanted = [(record.id, DATA_OBJECT)]
    for contributor in record.contributors:
        wanted.append((contributor.researcher_id, RESEARCHER))
        if contributor.institution_id:
            wanted.append((contributor.institution_id, INSTITUTION))
    for node_id, kind in wanted:
        if planned.setdefault(node_id, kind) != kind:
            return f"record uses id {node_id!r} both as {planned[node_id]} and as {kind}"
    for node_id, kind in planned.items():
        problem = _kind_check(graph, node_id, kind)
        if problem:
            return problem
    graph.upsert_node(
        record.id,
        DATA_OBJECT,
        {
            "title": record.title,
            "repository": record.repository,
            "published": record.published,
            "metadata": metadata_to_attrs(record.metadata),
        },
    )
    for contributor in record.contributors:
        graph.upsert_node(contributor.researcher_id, RESEARCHER)
        graph.add_edge("contributed_to", contributor.researcher_id, record.id)
        if contributor.institution_id:
            graph.upsert_node(contributor.institution_id, INSTITUTION)
            graph.add_edge(
                "affiliated_with",
                contributor.researcher_id,
                contributor.institution_id,
                {"object_id": record.id},
            )
    return None


def _apply_event(graph: KnowledgeGraph, record: ReuseEventRecord) -> str | None:
    if not graph.has_node(record.data_object_id) or (
        graph.node(record.data_object_id).kind != DATA_OBJECT
    ):
        return f"reuse event for unknown data object {record.data_object_id!r}"
    problem = _kind_check(graph, record.source_id, REUSE_SOURCE)
    if problem:
        return problem
    attrs: dict = {"event_kind": record.kind, "occurred": record.occurred}
    if record.weight_override is not None:
        attrs["weight_override"] = record.weight_override
    graph.upsert_node(record.source_id, REUSE_SOURCE)
    graph.add_edge("reused_by", record.data_object_id, record.source_id, attrs)
    return None


def _apply_override(graph: KnowledgeGraph, record: CuratorOverrideRecord) -> str | None:
    if not graph.has_node(record.object_id) or (
        graph.node(record.object_id).kind != DATA_OBJECT
    ):
        return f"curator override for unknown data object {record.object_id!r}"
    graph.add_override(
        CuratorOverride(
            object_id=record.object_id,
            dimension=record.dimension,
            value=record.value,
            curator_id=record.curator_id,
            timestamp=record.timestamp,
        )
    )
    return None


_APPLIERS = {
    DataObjectRecord: _apply_object,
    ReuseEventRecord: _apply_event,
    CuratorOverrideRecord: _apply_override,
}


def apply(
    records: Iterable[Record],
    graph: KnowledgeGraph,
    parse_rejections: Iterable[Rejection] = (),
) -> IngestReport:
    """Apply validated records to the graph, in stream order.

    Returns a report in which every record (and every already-rejected
    parse line handed in via `parse_rejections`) is counted exactly
    once. Records whose preconditions fail are rejected with a reason;
    records that change nothing (exact replays) are deduplicated.
    """
    report = IngestReport()
    rejections: list[Rejection] = []
    for rejection in parse_rejections:
        report.counts[rejection.record_type].rejected += 1
        rejections.append(rejection)
    for record in records:
        record_type = _RECORD_TYPE_OF[type(record)]
        counts = report.counts[record_type]
        before = graph.mutation_count
        try:
            problem = _APPLIERS[type(record)](graph, record)
        except QicError as exc:
            problem = str(exc)
        if problem is not None:
            counts.rejected += 1
            rejections.append(
                Rejection(
                    record_type=record_type,
                    source=record.source,
                    line_no=record.line_no,
                    reason=problem,
                )
            )
        elif graph.mutation_count > before:
            counts.accepted += 1
        else:
            counts.deduplicated += 1
    report.rejections = tuple(rejections)
    return report


def ingest_streams(
    graph: KnowledgeGraph,
    object_streams: Iterable[tuple[str, Iterable[str]]] = (),
    event_streams: Iterable[tuple[str, Iterable[str]]] = (),
    override_streams: Iterable[tuple[str, Iterable[str]]] = (),
) -> IngestReport:
    """Parse labeled (source, lines) streams and apply them in order.

    Objects go first, then reuse events, then overrides, so records in
    one batch may reference objects earlier in the same batch.
    """
    records: list[Record] = []
    rejections: list[Rejection] = []
    for record_type, streams in (
        ("data_object", object_streams),
        ("reuse_event", event_streams),
        ("curator_override", override_streams),
    ):
        for source, lines in streams:
            parsed, bad = parse_records(lines, record_type, source=source)
            records.extend(parsed)
            rejections.extend(bad)
    return apply(records, graph, parse_rejections=rejections)


def ingest_files(
    graph: KnowledgeGraph,
    object_paths: Iterable[str | Path] = (),
    event_paths: Iterable[str | Path] = (),
    override_paths: Iterable[str | Path] = (),
) -> IngestReport:
    """`ingest_streams` over files; unreadable paths raise OSError."""

    def load(paths: Iterable[str | Path]) -> list[tuple[str, list[str]]]:
        return [
            (str(path), Path(path).read_text(encoding="utf-8").splitlines())
            for path in paths
        ]

    return ingest_streams(
        graph,
        object_streams=load(object_paths),
        event_streams=load(event_paths),
        override_streams=load(override_paths),
    )


# -- source adapters ---------------------------------------------------------


@dataclass(frozen=True)
class RecordStreams:
    """Fully materialized raw JSONL lines from one source."""

    origin: str
    objects: tuple[str, ...] = ()
    events: tuple[str, ...] = ()
    overrides: tuple[str, ...] = ()


def bundled_personas_dir() -> Path:
    """Directory of the bundled persona fixture files."""
    return Path(str(resources.files("qic").joinpath("fixtures/personas")))


def _fixture_adapter(config: Mapping) -> RecordStreams:
    base = Path(config.get("path") or bundled_personas_dir())
    if not base.is_dir():
        raise AdapterError(f"fixture adapter path {base} is not a directory")

    def read(name: str) -> tuple[str, ...]:
        path = base / name
        if not path.exists():
            return ()
        return tuple(path.read_text(encoding="utf-8").splitlines())

    return RecordStreams(
        origin=f"fixture:{base}",
        objects=read("objects.jsonl"),
        events=read("events.jsonl"),
        overrides=read("overrides.jsonl"),
    )


def _stub_adapter(name: str, needs: str) -> Callable[[Mapping], RecordStreams]:
    def fetch(config: Mapping) -> RecordStreams:
        raise AdapterError(
            f"the {name!r} adapter is an interface stub: live {needs} harvesting "
            "is out of scope for this build. Use the 'fixture' adapter instead."
        )

    return fetch


ADAPTERS: dict[str, Callable[[Mapping], RecordStreams]] = {
    "fixture": _fixture_adapter,
    "datacite": _stub_adapter("datacite", "repository-metadata"),
    "usage-stats": _stub_adapter("usage-stats", "usage-statistics"),
}


def register_adapter(name: str, fetch: Callable[[Mapping], RecordStreams]) -> None:
    """Register (or replace) a source adapter under a name."""
    ADAPTERS[name] = fetch


def fetch_from_source(adapter_name: str, config: Mapping | None = None) -> RecordStreams:
    """Materialize one source's records via its registered adapter."""
    try:
        fetch = ADAPTERS[adapter_name]
    except KeyError:
        raise UnknownAdapterError(
            f"unknown source adapter {adapter_name!r} (registered: {sorted(ADAPTERS)})"
        )
    return fetch(config or {})


def ingest_source(
    graph: KnowledgeGraph, adapter_name: str, config: Mapping | None = None
) -> IngestReport:
    """Fetch one source's records and apply them to the graph."""
    streams = fetch_from_source(adapter_name, config)
    return ingest_streams(
        graph,
        object_streams=[(f"{streams.origin}/objects.jsonl", streams.objects)],
        event_streams=[(f"{streams.origin}/events.jsonl", streams.events)],
        override_streams=[(f"{streams.origin}/overrides.jsonl", streams.overrides)],
    )
