"""Scoring engine for shared research data.

Each data object earns a score s = Q * I * C — metadata quality,
log-tempered reuse impact, and collaboration breadth — and a
researcher's index is the sum of s over every object they contributed
to. The package covers the whole pipeline: JSONL ingestion into an
embedded knowledge graph, rule-based quality assessment with curator
overrides, deterministic recomputation with rankings, explanations and
time-sliced snapshots, and a CLI tying it together.
"""

from .config import EngineConfig, config_from_file, load_config
from .errors import QicError
from .fair import (
    CuratorOverride,
    FairAssessment,
    ObjectMetadata,
    QualityRules,
    RuleSet,
    assess,
)
from .graph import GraphSnapshot, KnowledgeGraph, ReuseEvent
from .ingest import (
    IngestReport,
    fetch_from_source,
    ingest_files,
    ingest_source,
    ingest_streams,
    parse_records,
)
from .kernels import get_kernels
from .metrics import (
    CollaborationCounts,
    FairSubScores,
    FairWeights,
    ObjectScore,
    ResearcherIndex,
    collaboration_score,
    impact_score,
    object_score,
    quality_score,
    researcher_index,
)
from .monitor import (
    Explanation,
    ScoreReport,
    SnapshotSeries,
    explain,
    rank,
    recompute,
    snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "CollaborationCounts",
    "CuratorOverride",
    "EngineConfig",
    "Explanation",
    "FairAssessment",
    "FairSubScores",
    "FairWeights",
    "GraphSnapshot",
    "IngestReport",
    "KnowledgeGraph",
    "ObjectMetadata",
    "ObjectScore",
    "QicError",
    "QualityRules",
    "ResearcherIndex",
    "ReuseEvent",
    "RuleSet",
    "ScoreReport",
    "SnapshotSeries",
    "assess",
    "collaboration_score",
    "config_from_file",
    "explain",
    "fetch_from_source",
    "get_kernels",
    "impact_score",
    "ingest_files",
    "ingest_source",
    "ingest_streams",
    "load_config",
    "object_score",
    "parse_records",
    "quality_score",
    "rank",
    "recompute",
    "researcher_index",
    "snapshot",
    "__version__",
]
