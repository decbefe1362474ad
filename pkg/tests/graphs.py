"""Graph builders shared across test modules."""

from __future__ import annotations

from qic.fair import CuratorOverride
from qic.graph import (
    AFFILIATED_WITH,
    CONTRIBUTED_TO,
    DATA_OBJECT,
    INSTITUTION,
    RESEARCHER,
    REUSE_SOURCE,
    REUSED_BY,
    KnowledgeGraph,
)


def add_event(g: KnowledgeGraph, obj: str, src: str, kind: str, occurred: str, **attrs) -> str:
    g.upsert_node(src, REUSE_SOURCE)
    return g.add_edge(REUSED_BY, obj, src, {"event_kind": kind, "occurred": occurred, **attrs})


def exhaustive_graph() -> KnowledgeGraph:
    """A ~100-node graph exercising every node and edge variety."""
    g = KnowledgeGraph()
    institutions = [f"ror:inst-{k:02d}" for k in range(8)]
    researchers = [f"orcid:r-{k:03d}" for k in range(20)]
    objects = [f"doi:10.5555/obj-{k:03d}" for k in range(30)]
    for inst in institutions:
        g.upsert_node(inst, INSTITUTION, {"name": inst.upper()})
    for rid in researchers:
        g.upsert_node(rid, RESEARCHER)
    for idx, obj in enumerate(objects):
        g.upsert_node(obj, DATA_OBJECT, {"title": f"dataset {idx}", "repository": "repo9"})
        for offset in range(1 + idx % 3):
            rid = researchers[(idx + 7 * offset) % len(researchers)]
            g.add_edge(CONTRIBUTED_TO, rid, obj)
            if idx % 2 == 0:
                inst = institutions[(idx + offset) % len(institutions)]
                g.add_edge(AFFILIATED_WITH, rid, inst, {"object_id": obj})
        for event in range(idx % 4):
            source = f"src:reuse-{idx:03d}-{event}"
            kind = ("citation", "mention", "download_batch", "derived_dataset")[event]
            attrs = {"weight_override": 0.5} if event == 2 else {}
            add_event(g, obj, source, kind, f"2024-0{1 + event}-15", **attrs)
        if idx % 5 == 0:
            g.add_override(
                CuratorOverride(obj, "R", 0.9, "curator:lee", "2024-04-02T09:30:00Z")
            )
    return g
