"""Shared fixtures plus the acceptance-criteria summary lines."""

from __future__ import annotations

import re

import pytest

from qic.config import EngineConfig
from qic.graph import KnowledgeGraph
from qic.ingest import ingest_source


@pytest.fixture
def personas_graph() -> KnowledgeGraph:
    """A fresh graph loaded with the bundled persona fixtures."""
    graph = KnowledgeGraph()
    report = ingest_source(graph, "fixture")
    assert report.total_rejected == 0
    return graph


@pytest.fixture
def default_config() -> EngineConfig:
    return EngineConfig()


_CRITERION = re.compile(r"test_criterion_(\d+)")

_LABELS = {
    1: "formula exactness at stated tolerances",
    2: "annihilation over >= 1000 randomized objects",
    3: "impact/collaboration monotonicity and concavity",
    4: "oracle equivalence on random graphs up to 10^4 edges",
    5: "persona scenario ordering and collaboration contrast",
    6: "pipeline idempotence and byte-identical reports",
    7: "persistence round-trip preserves queries and scores",
    8: "FAIR rule engine enumeration and override dominance",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    outcomes: dict[int, bool] = {}
    for status, reports in terminalreporter.stats.items():
        if status not in ("passed", "failed", "error"):
            continue
        for report in reports:
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            match = _CRITERION.search(nodeid)
            if not match:
                continue
            if status == "passed" and getattr(report, "when", "call") != "call":
                continue
            number = int(match.group(1))
            outcomes[number] = outcomes.get(number, True) and status == "passed"
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(outcomes):
        verdict = "PASS" if outcomes[number] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict} - {_LABELS.get(number, '')}")
