"""Full-graph score recomputation, rankings, explanations, snapshots.

`recompute` is the correctness baseline: a pure function over one graph
snapshot plus one config that scores every data object (quality from
the rule engine, impact from the reuse log, collaboration from the
contributor counts) and totals every researcher. All accumulation
orders are fixed — reuse events by (occurred, source, kind), researcher
contributions lexicographic by object id — so a recompute is
bit-reproducible on any backend, and reports serialize byte-stably as
JSONL (object rows, then researcher rows) or an aligned text table.

`explain` unpacks one object's score into everything needed to redo it
by hand: the fired quality rules, the curator overrides, the weighted
reuse events, the collaboration counts, and the zero-reuse policy.
`snapshot` replays the same recompute at a series of as-of dates, under
which each object's impact (and so its score) can only grow.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Mapping

import numpy as np

from .config import EngineConfig
from .errors import InvalidCountError, UnknownNodeError, UnorderedDatesError
from .fair import CURATED, DIMENSIONS, CuratorOverride, FairAssessment, TraceEntry
from .graph import (
    DATA_OBJECT,
    RESEARCHER,
    KnowledgeGraph,
    ReuseEvent,
    as_date,
    canonical_json,
)
from .ingest import metadata_from_attrs
from .kernels import Kernels, get_kernels
from .metrics import CollaborationCounts


@dataclass(frozen=True)
class ObjectRow:
    """One scored data object."""

    object_id: str
    q: float
    i: float
    c: float
    s: float
    provenance: Mapping[str, str]
    reuse_events: int
    n_authors: int
    n_institutions: int

    def to_dict(self) -> dict:
        return {
            "row": "object",
            "object_id": self.object_id,
            "q": self.q,
            "i": self.i,
            "c": self.c,
            "s": self.s,
            "provenance": dict(self.provenance),
            "reuse_events": self.reuse_events,
        }


@dataclass(frozen=True)
class ResearcherRow:
    """One researcher's total over every object they contributed to."""

    researcher_id: str
    s_total: float
    contributions: tuple[str, ...]

    @property
    def contribution_count(self) -> int:
        return len(self.contributions)

    def to_dict(self) -> dict:
        return {
            "row": "researcher",
            "researcher_id": self.researcher_id,
            "s_total": self.s_total,
            "contribution_count": self.contribution_count,
        }


@dataclass(frozen=True)
class ObjectDetail:
    """Raw scoring inputs kept alongside a report for explanations."""

    assessment: FairAssessment
    events: tuple[ReuseEvent, ...]
    weights: tuple[float, ...]
    counts: CollaborationCounts


@dataclass(frozen=True)
class ScoreReport:
    """Every object and researcher score as of one date."""

    as_of: str | None
    objects: tuple[ObjectRow, ...]
    researchers: tuple[ResearcherRow, ...]
    fair_weights: Mapping[str, float]
    zero_reuse_policy: str
    details: Mapping[str, ObjectDetail] = field(default_factory=dict, repr=False)

    def find_object(self, object_id: str) -> ObjectRow | None:
        for row in self.objects:
            if row.object_id == object_id:
                return row
        return None

    def find_researcher(self, researcher_id: str) -> ResearcherRow | None:
        for row in self.researchers:
            if row.researcher_id == researcher_id:
                return row
        return None

    def to_jsonl(self) -> str:
        lines = [canonical_json(row.to_dict()) for row in self.objects]
        lines.extend(canonical_json(row.to_dict()) for row in self.researchers)
        return "".join(line + "\n" for line in lines)

    def to_table(self) -> str:
        as_of = self.as_of or "-"
        lines = [f"scores as of {as_of}"]
        lines.append("")
        header = f"{'object_id':<34} {'q':>10} {'i':>10} {'c':>10} {'s':>12} {'curated':>7} {'events':>6}"
        lines.append(header)
        lines.append("-" * len(header))
        for row in self.objects:
            curated = "".join(d for d in DIMENSIONS if row.provenance.get(d) == CURATED) or "-"
            lines.append(
                f"{row.object_id:<34} {row.q:>10.6f} {row.i:>10.6f} {row.c:>10.6f} "
                f"{row.s:>12.6f} {curated:>7} {row.reuse_events:>6}"
            )
        lines.append("")
        header = f"{'researcher_id':<34} {'s_total':>12} {'objects':>7}"
        lines.append(header)
        lines.append("-" * len(header))
        for row in self.researchers:
            lines.append(f"{row.researcher_id:<34} {row.s_total:>12.6f} {row.contribution_count:>7}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """SHA-256 of the JSONL serialization; stable for fixed inputs."""
        return hashlib.sha256(self.to_jsonl().encode("utf-8")).hexdigest()


def recompute(
    graph: KnowledgeGraph,
    config: EngineConfig | None = None,
    as_of: str | date | None = None,
    kernels: Kernels | None = None,
) -> ScoreReport:
    """Score the whole graph as of one date.

    Pure over (graph, config, as_of): mutates nothing and returns the
    same report — bit for bit — on every run and every kernel backend.
    Researchers appear in the report even when every score they touch
    is zero.
    """
    config = config or EngineConfig()
    graph.verify_integrity()
    k = kernels or get_kernels()
    rules = config.quality_rules()
    bound = as_date(as_of) if as_of is not None else None

    object_ids = graph.nodes_of_kind(DATA_OBJECT)
    assessments: list[FairAssessment] = []
    details: dict[str, ObjectDetail] = {}
    sub_f, sub_a, sub_i, sub_r = [], [], [], []
    authors, institutions = [], []
    event_counts: list[int] = []
    weights_flat: list[float] = []
    offsets = [0]
    for object_id in object_ids:
        node = graph.node(object_id)
        metadata = metadata_from_attrs(node.attributes.get("metadata", {}))
        assessment = rules.assess(metadata, graph.overrides_of(object_id))
        events = graph.reuse_events(object_id, as_of=bound)
        weights = graph.reuse_weights(object_id, config.reuse_kind_weights, as_of=bound)
        counts = graph.collaboration_counts(object_id)
        assessments.append(assessment)
        details[object_id] = ObjectDetail(
            assessment=assessment, events=events, weights=weights, counts=counts
        )
        sub_f.append(assessment.sub_scores.q_f)
        sub_a.append(assessment.sub_scores.q_a)
        sub_i.append(assessment.sub_scores.q_i)
        sub_r.append(assessment.sub_scores.q_r)
        authors.append(counts.n_authors)
        institutions.append(counts.n_institutions)
        event_counts.append(len(events))
        weights_flat.extend(weights)
        offsets.append(len(weights_flat))

    w = config.fair_weights
    quality = k.quality_scores(
        np.asarray(sub_f, dtype=np.float64),
        np.asarray(sub_a, dtype=np.float64),
        np.asarray(sub_i, dtype=np.float64),
        np.asarray(sub_r, dtype=np.float64),
        w.w_f,
        w.w_a,
        w.w_i,
        w.w_r,
    )
    totals = k.segment_totals(
        np.asarray(weights_flat, dtype=np.float64), np.asarray(offsets, dtype=np.int64)
    )
    impact = k.impact_scores(totals, config.formula_at_zero)
    collaboration = k.collaboration_scores(
        np.asarray(authors, dtype=np.float64), np.asarray(institutions, dtype=np.float64)
    )
    scores = k.combined_scores(quality, impact, collaboration)

    object_rows = tuple(
        ObjectRow(
            object_id=object_id,
            q=float(quality[j]),
            i=float(impact[j]),
            c=float(collaboration[j]),
            s=float(scores[j]),
            provenance=dict(assessments[j].provenance),
            reuse_events=event_counts[j],
            n_authors=authors[j],
            n_institutions=institutions[j],
        )
        for j, object_id in enumerate(object_ids)
    )

    researcher_ids = graph.nodes_of_kind(RESEARCHER)
    index_of = {object_id: j for j, object_id in enumerate(object_ids)}
    gather: list[int] = []
    r_offsets = [0]
    contributions: list[tuple[str, ...]] = []
    for researcher_id in researcher_ids:
        contributed = graph.contributions_of(researcher_id)
        contributions.append(contributed)
        gather.extend(index_of[object_id] for object_id in contributed)
        r_offsets.append(len(gather))
    gathered = (
        scores[np.asarray(gather, dtype=np.int64)]
        if gather
        else np.empty(0, dtype=np.float64)
    )
    r_totals = k.segment_totals(gathered, np.asarray(r_offsets, dtype=np.int64))
    researcher_rows = tuple(
        ResearcherRow(
            researcher_id=researcher_id,
            s_total=float(r_totals[j]),
            contributions=contributions[j],
        )
        for j, researcher_id in enumerate(researcher_ids)
    )

    return ScoreReport(
        as_of=bound.isoformat() if bound is not None else None,
        objects=object_rows,
        researchers=researcher_rows,
        fair_weights={"F": w.w_f, "A": w.w_a, "I": w.w_i, "R": w.w_r},
        zero_reuse_policy=config.zero_reuse_policy,
        details=details,
    )


def rank(report: ScoreReport, top_n: int) -> tuple[ResearcherRow, ...]:
    """Top researchers by total score, ties lexicographic by id."""
    if not isinstance(top_n, int) or isinstance(top_n, bool) or top_n < 1:
        raise InvalidCountError(f"top_n must be a positive integer, got {top_n!r}")
    ordered = sorted(report.researchers, key=lambda r: (-r.s_total, r.researcher_id))
    return tuple(ordered[:top_n])


@dataclass(frozen=True)
class ExplainedEvent:
    """One reuse event with the weight it contributed."""

    source_id: str
    event_kind: str
    occurred: str
    weight: float
    overridden: bool


@dataclass(frozen=True)
class Explanation:
    """Everything needed to recompute one object's score by hand."""

    object_id: str
    q: float
    i: float
    c: float
    s: float
    sub_scores: Mapping[str, float]
    computed_sub_scores: Mapping[str, float]
    provenance: Mapping[str, str]
    fair_weights: Mapping[str, float]
    rule_trace: tuple[TraceEntry, ...]
    overrides_applied: tuple[CuratorOverride, ...]
    events: tuple[ExplainedEvent, ...]
    reuse_weight_total: float
    zero_reuse_policy: str
    n_authors: int
    n_institutions: int

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "q": self.q,
            "i": self.i,
            "c": self.c,
            "s": self.s,
            "sub_scores": dict(self.sub_scores),
            "computed_sub_scores": dict(self.computed_sub_scores),
            "provenance": dict(self.provenance),
            "fair_weights": dict(self.fair_weights),
            "rule_trace": [
                {
                    "dimension": t.dimension,
                    "rule_id": t.rule_id,
                    "points_awarded": t.points_awarded,
                }
                for t in self.rule_trace
            ],
            "overrides_applied": [
                {
                    "dimension": o.dimension,
                    "value": o.value,
                    "curator_id": o.curator_id,
                    "timestamp": o.timestamp,
                }
                for o in self.overrides_applied
            ],
            "events": [
                {
                    "source_id": e.source_id,
                    "event_kind": e.event_kind,
                    "occurred": e.occurred,
                    "weight": e.weight,
                    "overridden": e.overridden,
                }
                for e in self.events
            ],
            "reuse_weight_total": self.reuse_weight_total,
            "zero_reuse_policy": self.zero_reuse_policy,
            "n_authors": self.n_authors,
            "n_institutions": self.n_institutions,
        }


def explain(report: ScoreReport, object_id: str) -> Explanation:
    """Decompose one reported object score into its raw ingredients."""
    row = report.find_object(object_id)
    detail = report.details.get(object_id)
    if row is None or detail is None:
        raise UnknownNodeError(f"object {object_id!r} is not in this report")
    total = 0.0
    explained = []
    for event, weight in zip(detail.events, detail.weights):
        total += weight
        explained.append(
            ExplainedEvent(
                source_id=event.source_id,
                event_kind=event.event_kind,
                occurred=event.occurred,
                weight=weight,
                overridden=event.weight_override is not None,
            )
        )
    assessment = detail.assessment
    return Explanation(
        object_id=object_id,
        q=row.q,
        i=row.i,
        c=row.c,
        s=row.s,
        sub_scores={
            "F": assessment.sub_scores.q_f,
            "A": assessment.sub_scores.q_a,
            "I": assessment.sub_scores.q_i,
            "R": assessment.sub_scores.q_r,
        },
        computed_sub_scores={
            "F": assessment.computed.q_f,
            "A": assessment.computed.q_a,
            "I": assessment.computed.q_i,
            "R": assessment.computed.q_r,
        },
        provenance=dict(assessment.provenance),
        fair_weights=dict(report.fair_weights),
        rule_trace=assessment.rule_trace,
        overrides_applied=assessment.overrides_applied,
        events=tuple(explained),
        reuse_weight_total=total,
        zero_reuse_policy=report.zero_reuse_policy,
        n_authors=row.n_authors,
        n_institutions=row.n_institutions,
    )


@dataclass(frozen=True)
class SnapshotEntry:
    as_of: str
    digest: str
    report: ScoreReport = field(repr=False)


@dataclass(frozen=True)
class SnapshotSeries:
    """Per-date score digests over a strictly increasing date series."""

    entries: tuple[SnapshotEntry, ...]

    def to_jsonl(self) -> str:
        return "".join(
            canonical_json({"as_of": e.as_of, "digest": e.digest}) + "\n" for e in self.entries
        )

    def to_table(self) -> str:
        lines = [f"{'as_of':<12} digest"]
        lines.extend(f"{e.as_of:<12} {e.digest}" for e in self.entries)
        return "\n".join(lines) + "\n"


def snapshot(
    graph: KnowledgeGraph,
    config: EngineConfig | None = None,
    dates: Iterable[str | date] = (),
    kernels: Kernels | None = None,
) -> SnapshotSeries:
    """Recompute the graph at each date of a strictly increasing series."""
    bounds = [as_date(d) for d in dates]
    for earlier, later in zip(bounds, bounds[1:]):
        if later <= earlier:
            raise UnorderedDatesError(
                f"snapshot dates must be strictly increasing, got {earlier} before {later}"
            )
    entries = []
    for bound in bounds:
        report = recompute(graph, config, as_of=bound, kernels=kernels)
        entries.append(SnapshotEntry(as_of=bound.isoformat(), digest=report.digest(), report=report))
    return SnapshotSeries(entries=tuple(entries))
