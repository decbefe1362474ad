"""Embedded entity-relationship store for the scoring pipeline.

Holds researchers, institutions, data objects, and reuse sources as
nodes, with three edge kinds:

* ``contributed_to`` — researcher -> data object (set semantics: the
  same contribution is stored once),
* ``affiliated_with`` — researcher -> institution, scoped to one
  contribution via a required ``object_id`` attribute so institution
  counts reflect affiliations at contribution time,
* ``reused_by`` — data object -> reuse source, carrying ``event_kind``,
  ``occurred`` (ISO date), and an optional ``weight_override``;
  deduplicated on (src, dst, event_kind, occurred).

Every query that returns a list uses a documented, stable order:
contributions lexicographic by object id, reuse events by
(occurred, source id, event kind). Persistence is a single JSONL file —
a header line carrying counts and a SHA-256 checksum of the body,
then node lines sorted by id, then edge lines sorted by
(kind, src, dst, canonical attribute JSON). Writes go to a temporary
file in the target directory and are renamed into place, so an
interrupted save never corrupts an existing graph; loads validate the
checksum, the counts, and referential integrity before returning, so a
corrupted file never yields a partially loaded graph.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    EdgeConstraintError,
    GraphIntegrityError,
    InvalidMetadataError,
    InvalidReuseWeightError,
    KindConflictError,
    MissingEndpointError,
    QicError,
    SchemaVersionError,
    UnknownNodeError,
    UnmappedEventKindError,
    ZeroContributorError,
)
from .fair import CuratorOverride
from .metrics import CollaborationCounts

SCHEMA_VERSION = 1

RESEARCHER = "researcher"
INSTITUTION = "institution"
DATA_OBJECT = "data_object"
REUSE_SOURCE = "reuse_source"
NODE_KINDS = (RESEARCHER, INSTITUTION, DATA_OBJECT, REUSE_SOURCE)

CONTRIBUTED_TO = "contributed_to"
AFFILIATED_WITH = "affiliated_with"
REUSED_BY = "reused_by"
EDGE_KINDS = (CONTRIBUTED_TO, AFFILIATED_WITH, REUSED_BY)

ACKNOWLEDGED = "acknowledged"
DEDUPLICATED = "deduplicated"

#: Node-attribute key holding curator overrides for a data object.
OVERRIDES_ATTR = "curator_overrides"


def canonical_json(obj) -> str:
    """Deterministic JSON used for dedup keys, file bodies, checksums."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def as_date(value: str | date) -> date:
    """Normalize an ISO-8601 date (or date object) to `datetime.date`."""
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise InvalidMetadataError(f"not an ISO-8601 date: {value!r} ({exc})")


@dataclass
class Node:
    id: str
    kind: str
    attributes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    kind: str
    src: str
    dst: str
    attributes: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class ReuseEvent:
    """One reuse of a data object, as recorded on a reused_by edge."""

    object_id: str
    source_id: str
    event_kind: str
    occurred: str
    weight_override: float | None = None

    @property
    def occurred_date(self) -> date:
        return as_date(self.occurred)

    def sort_key(self) -> tuple[str, str, str]:
        return (self.occurred, self.source_id, self.event_kind)


@dataclass(frozen=True)
class GraphSnapshot:
    """Summary of one persisted graph state."""

    schema_version: int
    node_count: int
    edge_count: int
    as_of: str | None
    checksum: str


class KnowledgeGraph:
    """In-memory graph with validated mutations and stable queries.

    Single-writer, multiple-reader: mutations are not locked here;
    callers serialize writes and readers see a consistent snapshot.
    """

    def __init__(self) -> None:
        self._nodes: dict[str, Node] = {}
        # Edges keyed by their dedup key; insertion never reorders.
        self._edges: dict[tuple, Edge] = {}
        # researcher id -> set of object ids
        self._contributions: dict[str, set[str]] = {}
        # object id -> set of researcher ids
        self._contributors: dict[str, set[str]] = {}
        # object id -> researcher id -> set of institution ids
        self._affiliations: dict[str, dict[str, set[str]]] = {}
        # object id -> list of ReuseEvent (unordered; queries sort)
        self._reuse: dict[str, list[ReuseEvent]] = {}
        #: Bumped once per state-changing mutation; lets callers detect
        #: whether a replayed record actually changed anything.
        self.mutation_count = 0

    # -- nodes ------------------------------------------------------------

    def upsert_node(self, node_id: str, kind: str, attributes: Mapping | None = None) -> str:
        """Create a node or merge attributes into an existing one.

        Idempotent for identical input; changing an existing node's
        kind is refused.
        """
        if not node_id or not isinstance(node_id, str):
            raise InvalidMetadataError(f"node id must be a nonempty string, got {node_id!r}")
        if kind not in NODE_KINDS:
            raise InvalidMetadataError(f"node kind must be one of {NODE_KINDS}, got {kind!r}")
        attrs = dict(attributes or {})
        existing = self._nodes.get(node_id)
        if existing is None:
            self._nodes[node_id] = Node(id=node_id, kind=kind, attributes=attrs)
            self.mutation_count += 1
            return node_id
        if existing.kind != kind:
            raise KindConflictError(
                f"node {node_id!r} already exists with kind {existing.kind!r}, not {kind!r}"
            )
        for key, value in attrs.items():
            if key not in existing.attributes or existing.attributes[key] != value:
                existing.attributes[key] = value
                self.mutation_count += 1
        return node_id

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node {node_id!r}")

    def _node_of_kind(self, node_id: str, kind: str) -> Node:
        found = self.node(node_id)
        if found.kind != kind:
            raise UnknownNodeError(f"node {node_id!r} is a {found.kind}, not a {kind}")
        return found

    def nodes_of_kind(self, kind: str) -> tuple[str, ...]:
        """Ids of all nodes of one kind, lexicographic."""
        return tuple(sorted(n.id for n in self._nodes.values() if n.kind == kind))

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    # -- edges ------------------------------------------------------------

    def add_edge(
        self, kind: str, src: str, dst: str, attributes: Mapping | None = None
    ) -> str:
        """Store one edge; returns ACKNOWLEDGED or DEDUPLICATED.

        Endpoints must already exist with the kinds the edge schema
        requires; a duplicate (per the edge kind's dedup key) leaves
        the graph unchanged.
        """
        attrs = dict(attributes or {})
        if kind == CONTRIBUTED_TO:
            self._require_endpoint(src, RESEARCHER)
            self._require_endpoint(dst, DATA_OBJECT)
            key = (kind, src, dst)
            if key in self._edges:
                return DEDUPLICATED
            self._edges[key] = Edge(kind=kind, src=src, dst=dst, attributes=attrs)
            self._contributions.setdefault(src, set()).add(dst)
            self._contributors.setdefault(dst, set()).add(src)
        elif kind == AFFILIATED_WITH:
            self._require_endpoint(src, RESEARCHER)
            self._require_endpoint(dst, INSTITUTION)
            object_id = attrs.get("object_id")
            if not object_id or not isinstance(object_id, str):
                raise EdgeConstraintError(
                    "affiliated_with requires an object_id attribute naming the contribution it is scoped to"
                )
            scoped = self._nodes.get(object_id)
            if scoped is None or scoped.kind != DATA_OBJECT:
                raise EdgeConstraintError(
                    f"affiliated_with object_id {object_id!r} is not a known data object"
                )
            key = (kind, src, dst, object_id)
            if key in self._edges:
                return DEDUPLICATED
            self._edges[key] = Edge(kind=kind, src=src, dst=dst, attributes=attrs)
            self._affiliations.setdefault(object_id, {}).setdefault(src, set()).add(dst)
        elif kind == REUSED_BY:
            self._require_endpoint(src, DATA_OBJECT)
            self._require_endpoint(dst, REUSE_SOURCE)
            event = self._validate_reuse_attrs(src, dst, attrs)
            key = (kind, src, dst, event.event_kind, event.occurred)
            if key in self._edges:
                return DEDUPLICATED
            self._edges[key] = Edge(kind=kind, src=src, dst=dst, attributes=attrs)
            self._reuse.setdefault(src, []).append(event)
        else:
            raise EdgeConstraintError(f"edge kind must be one of {EDGE_KINDS}, got {kind!r}")
        self.mutation_count += 1
        return ACKNOWLEDGED

    def _require_endpoint(self, node_id: str, kind: str) -> None:
        found = self._nodes.get(node_id)
        if found is None:
            raise MissingEndpointError(f"edge endpoint {node_id!r} does not exist")
        if found.kind != kind:
            raise EdgeConstraintError(
                f"edge endpoint {node_id!r} must be a {kind}, got {found.kind}"
            )

    def _validate_reuse_attrs(self, src: str, dst: str, attrs: Mapping) -> ReuseEvent:
        event_kind = attrs.get("event_kind")
        if not event_kind or not isinstance(event_kind, str):
            raise EdgeConstraintError("reused_by requires a nonempty event_kind attribute")
        occurred = attrs.get("occurred")
        if not isinstance(occurred, str):
            raise EdgeConstraintError("reused_by requires an occurred attribute (ISO-8601 date)")
        as_date(occurred)
        weight_override = attrs.get("weight_override")
        if weight_override is not None:
            if (
                not isinstance(weight_override, (int, float))
                or isinstance(weight_override, bool)
                or not math.isfinite(weight_override)
                or weight_override < 0.0
            ):
                raise InvalidReuseWeightError(
                    f"weight_override must be a finite number >= 0, got {weight_override!r}"
                )
            weight_override = float(weight_override)
        return ReuseEvent(
            object_id=src,
            source_id=dst,
            event_kind=event_kind,
            occurred=occurred,
            weight_override=weight_override,
        )

    def edges(self) -> tuple[Edge, ...]:
        """All edges sorted by (kind, src, dst, canonical attrs)."""
        return tuple(
            sorted(
                self._edges.values(),
                key=lambda e: (e.kind, e.src, e.dst, canonical_json(dict(e.attributes))),
            )
        )

    # -- queries ----------------------------------------------------------

    def contributions_of(self, researcher_id: str) -> tuple[str, ...]:
        """Object ids a researcher contributed to, lexicographic."""
        self._node_of_kind(researcher_id, RESEARCHER)
        return tuple(sorted(self._contributions.get(researcher_id, ())))

    def contributors_of(self, object_id: str) -> tuple[str, ...]:
        """Researcher ids that contributed to an object, lexicographic."""
        self._node_of_kind(object_id, DATA_OBJECT)
        return tuple(sorted(self._contributors.get(object_id, ())))

    def collaboration_counts(self, object_id: str) -> CollaborationCounts:
        """Distinct author and institution counts for one object.

        Institutions come from affiliation edges scoped to this object
        whose researcher actually contributed to it; objects with no
        recorded affiliation floor the institution count at 1 so the
        collaboration factor stays defined.
        """
        contributors = self.contributors_of(object_id)
        if not contributors:
            raise ZeroContributorError(f"object {object_id!r} has no contributors")
        scoped = self._affiliations.get(object_id, {})
        institutions: set[str] = set()
        for researcher_id in contributors:
            institutions.update(scoped.get(researcher_id, ()))
        return CollaborationCounts(
            n_authors=len(contributors),
            n_institutions=max(1, len(institutions)),
        )

    def reuse_events(
        self, object_id: str, as_of: str | date | None = None
    ) -> tuple[ReuseEvent, ...]:
        """Reuse events of an object, sorted by (occurred, source, kind).

        With `as_of`, events dated after it are excluded.
        """
        self._node_of_kind(object_id, DATA_OBJECT)
        events = self._reuse.get(object_id, [])
        if as_of is not None:
            bound = as_date(as_of)
            events = [e for e in events if e.occurred_date <= bound]
        return tuple(sorted(events, key=ReuseEvent.sort_key))

    def reuse_weights(
        self,
        object_id: str,
        kind_weights: Mapping[str, float],
        as_of: str | date | None = None,
    ) -> tuple[float, ...]:
        """One weight per reuse event dated <= as_of, in event order.

        A per-event override wins over the kind's configured weight;
        an event kind absent from `kind_weights` (and with no
        override) is refused rather than silently skipped.
        """
        weights = []
        for event in self.reuse_events(object_id, as_of=as_of):
            if event.weight_override is not None:
                weights.append(event.weight_override)
            elif event.event_kind in kind_weights:
                weights.append(float(kind_weights[event.event_kind]))
            else:
                raise UnmappedEventKindError(
                    f"no weight configured for reuse event kind {event.event_kind!r} "
                    f"on object {object_id!r}"
                )
        return tuple(weights)

    # -- curator overrides --------------------------------------------------

    def add_override(self, override: CuratorOverride) -> str:
        """Attach a curator override to its object's node attributes.

        Returns ACKNOWLEDGED or DEDUPLICATED; the stored list is kept
        in a canonical order so persistence is byte-stable.
        """
        node = self._node_of_kind(override.object_id, DATA_OBJECT)
        entry = {
            "dimension": override.dimension,
            "value": override.value,
            "curator_id": override.curator_id,
            "timestamp": override.timestamp,
        }
        stored: list = node.attributes.setdefault(OVERRIDES_ATTR, [])
        if entry in stored:
            return DEDUPLICATED
        stored.append(entry)
        stored.sort(key=lambda e: (e["dimension"], e["timestamp"], e["curator_id"], e["value"]))
        self.mutation_count += 1
        return ACKNOWLEDGED

    def overrides_of(self, object_id: str) -> tuple[CuratorOverride, ...]:
        node = self._node_of_kind(object_id, DATA_OBJECT)
        return tuple(
            CuratorOverride(object_id=object_id, **entry)
            for entry in node.attributes.get(OVERRIDES_ATTR, [])
        )

    # -- integrity ----------------------------------------------------------

    def verify_integrity(self) -> None:
        """Raise GraphIntegrityError unless the graph is consistent.

        Checks that every edge endpoint exists with the kind its edge
        schema requires and that every affiliation's scoping object is
        a known data object.
        """
        requirements = {
            CONTRIBUTED_TO: (RESEARCHER, DATA_OBJECT),
            AFFILIATED_WITH: (RESEARCHER, INSTITUTION),
            REUSED_BY: (DATA_OBJECT, REUSE_SOURCE),
        }
        for edge in self._edges.values():
            src_kind, dst_kind = requirements[edge.kind]
            for node_id, want in ((edge.src, src_kind), (edge.dst, dst_kind)):
                found = self._nodes.get(node_id)
                if found is None:
                    raise GraphIntegrityError(
                        f"{edge.kind} edge references missing node {node_id!r}"
                    )
                if found.kind != want:
                    raise GraphIntegrityError(
                        f"{edge.kind} edge endpoint {node_id!r} is a {found.kind}, expected {want}"
                    )
            if edge.kind == AFFILIATED_WITH:
                scoped = self._nodes.get(edge.attributes.get("object_id"))
                if scoped is None or scoped.kind != DATA_OBJECT:
                    raise GraphIntegrityError(
                        f"affiliated_with edge {edge.src!r}->{edge.dst!r} is scoped to an unknown data object"
                    )

    # -- persistence ----------------------------------------------------------

    def _body_lines(self, as_of: str | date | None = None) -> tuple[list[str], int, int]:
        bound = as_date(as_of) if as_of is not None else None
        lines = []
        for node_id in sorted(self._nodes):
            node = self._nodes[node_id]
            lines.append(
                canonical_json(
                    {"type": "node", "id": node.id, "kind": node.kind, "attributes": node.attributes}
                )
            )
        edges = []
        for edge in self._edges.values():
            if bound is not None and edge.kind == REUSED_BY:
                if as_date(edge.attributes["occurred"]) > bound:
                    continue
            edges.append(edge)
        edge_lines = sorted(
            canonical_json(
                {"type": "edge", "kind": e.kind, "src": e.src, "dst": e.dst, "attributes": dict(e.attributes)}
            )
            for e in edges
        )
        lines.extend(edge_lines)
        return lines, len(self._nodes), len(edges)

    def checksum(self, as_of: str | date | None = None) -> str:
        """SHA-256 over the canonical body; equal graphs hash equal."""
        lines, _, _ = self._body_lines(as_of)
        body = "".join(line + "\n" for line in lines)
        return hashlib.sha256(body.encode("utf-8")).hexdigest()

    def save(self, path: str | Path, as_of: str | date | None = None) -> GraphSnapshot:
        """Persist atomically; returns the written snapshot's summary.

        With `as_of`, reuse edges dated after the bound are excluded
        from the written snapshot (nodes and other edges are kept).
        """
        target = Path(path)
        lines, node_count, edge_count = self._body_lines(as_of)
        body = "".join(line + "\n" for line in lines)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        as_of_text = as_date(as_of).isoformat() if as_of is not None else None
        header = canonical_json(
            {
                "schema_version": SCHEMA_VERSION,
                "node_count": node_count,
                "edge_count": edge_count,
                "as_of": as_of_text,
                "checksum": digest,
            }
        )
        fd, tmp_name = tempfile.mkstemp(
            dir=target.parent or Path("."), prefix=target.name + ".", suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(header + "\n")
                handle.write(body)
            os.replace(tmp_name, target)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
        return GraphSnapshot(
            schema_version=SCHEMA_VERSION,
            node_count=node_count,
            edge_count=edge_count,
            as_of=as_of_text,
            checksum=digest,
        )

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeGraph":
        """Rebuild a graph from a saved file, or refuse entirely.

        The checksum, the header counts, and full referential
        integrity are all validated before the graph is returned;
        failures raise without yielding a partially loaded graph.
        """
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if not lines:
            raise GraphIntegrityError(f"graph file {path} is empty")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise GraphIntegrityError(f"graph file {path} has an unreadable header: {exc}")
        if not isinstance(header, dict) or "schema_version" not in header:
            raise GraphIntegrityError(f"graph file {path} has no schema_version header")
        if header["schema_version"] != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"graph file {path} has schema_version {header['schema_version']!r}, "
                f"this build reads {SCHEMA_VERSION}"
            )
        body_lines = lines[1:]
        body = "".join(line + "\n" for line in body_lines)
        digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
        if digest != header.get("checksum"):
            raise GraphIntegrityError(f"graph file {path} failed its checksum; refusing to load")

        graph = cls()
        node_lines = 0
        edge_lines = 0
        try:
            records = [json.loads(line) for line in body_lines]
            for record in records:
                if record.get("type") == "node":
                    node_lines += 1
                    graph.upsert_node(record["id"], record["kind"], record.get("attributes", {}))
            for record in records:
                if record.get("type") == "edge":
                    edge_lines += 1
                    graph.add_edge(
                        record["kind"], record["src"], record["dst"], record.get("attributes", {})
                    )
                elif record.get("type") != "node":
                    raise GraphIntegrityError(f"unknown record type {record.get('type')!r}")
        except QicError as exc:
            raise GraphIntegrityError(f"graph file {path} is not internally consistent: {exc}")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise GraphIntegrityError(f"graph file {path} has a malformed record: {exc}")
        if node_lines != header.get("node_count") or edge_lines != header.get("edge_count"):
            raise GraphIntegrityError(
                f"graph file {path} header counts ({header.get('node_count')} nodes, "
                f"{header.get('edge_count')} edges) do not match its body "
                f"({node_lines} nodes, {edge_lines} edges)"
            )
        graph.verify_integrity()
        return graph
