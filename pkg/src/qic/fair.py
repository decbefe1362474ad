"""Rule-based FAIR assessment with curator overrides.

Each dimension (F, A, I, R) is scored by a small table of rules loaded
from a JSON policy file (the built-in table ships as package data, so
the scoring policy is data, not code). A rule awards ``points *
predicate(metadata)`` where most predicates answer 0 or 1; metadata
completeness scales its points linearly. Points per dimension sum to
1.0, so every computed sub-score lands in [0, 1], and the trace of
(rule, points awarded) pairs reproduces each computed value exactly.

Curators can pin a dimension to a verified value. The latest override
wins; overrides sharing a timestamp must agree on the value or the
assessment refuses to choose. The final assessment records, per
dimension, whether the value was computed or curated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    InvalidMetadataError,
    OverrideConflictError,
    RuleFileError,
)
from .metrics import FairSubScores

DIMENSIONS = ("F", "A", "I", "R")
IDENTIFIER_SCHEMES = ("doi", "handle", "ark", "url", "none")
ACCESS_PROTOCOLS = ("https", "ftp", "other", "none")

#: Identifier schemes that count as persistent.
PERSISTENT_ID_SCHEMES = frozenset({"doi", "handle", "ark"})

#: Thresholds for the rich-metadata rule. Arbitrary but fixed: a title,
#: a description of at least this many characters, and at least this
#: many keywords.
RICH_DESCRIPTION_MIN_CHARS = 200
RICH_KEYWORDS_MIN = 3

DEFAULT_OPEN_LICENSES = ("Apache-2.0", "CC-BY-4.0", "CC-BY-SA-4.0", "CC0-1.0", "MIT")
DEFAULT_STANDARD_FORMATS = (
    "application/json",
    "application/x-netcdf",
    "application/x-parquet",
    "text/csv",
    "text/tab-separated-values",
)

RULES_SCHEMA = "rules@1"
POINTS_SUM_TOLERANCE = 1e-9

COMPUTED = "computed"
CURATED = "curated"


@dataclass(frozen=True)
class ObjectMetadata:
    """Raw metadata of one data object, as harvested from a repository."""

    identifier_scheme: str = "none"
    title: str = ""
    description_chars: int = 0
    keywords: tuple[str, ...] = ()
    license_id: str | None = None
    access_url: str | None = None
    access_protocol: str = "none"
    formats: tuple[str, ...] = ()
    uses_standard_schema: bool = False
    has_provenance: bool = False
    completeness_ratio: float = 0.0

    def __post_init__(self) -> None:
        if self.identifier_scheme not in IDENTIFIER_SCHEMES:
            raise InvalidMetadataError(
                f"identifier_scheme must be one of {IDENTIFIER_SCHEMES}, got {self.identifier_scheme!r}"
            )
        if self.access_protocol not in ACCESS_PROTOCOLS:
            raise InvalidMetadataError(
                f"access_protocol must be one of {ACCESS_PROTOCOLS}, got {self.access_protocol!r}"
            )
        if not isinstance(self.description_chars, int) or self.description_chars < 0:
            raise InvalidMetadataError(
                f"description_chars must be a nonnegative integer, got {self.description_chars!r}"
            )
        ratio = self.completeness_ratio
        if (
            not isinstance(ratio, (int, float))
            or isinstance(ratio, bool)
            or not math.isfinite(ratio)
            or not 0.0 <= ratio <= 1.0
        ):
            raise InvalidMetadataError(f"completeness_ratio must lie in [0, 1], got {ratio!r}")


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    parsed = datetime.fromisoformat(raw)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


@dataclass(frozen=True)
class CuratorOverride:
    """A human-verified value for one FAIR dimension of one object."""

    object_id: str
    dimension: str
    value: float
    curator_id: str
    timestamp: str

    def __post_init__(self) -> None:
        if self.dimension not in DIMENSIONS:
            raise InvalidMetadataError(
                f"override dimension must be one of {DIMENSIONS}, got {self.dimension!r}"
            )
        if (
            not isinstance(self.value, (int, float))
            or isinstance(self.value, bool)
            or not math.isfinite(self.value)
            or not 0.0 <= self.value <= 1.0
        ):
            raise InvalidMetadataError(f"override value must lie in [0, 1], got {self.value!r}")
        parse_timestamp(self.timestamp)

    @property
    def occurred_at(self) -> datetime:
        return parse_timestamp(self.timestamp)


@dataclass(frozen=True)
class TraceEntry:
    """One fired rule: which dimension, which rule, how many points."""

    dimension: str
    rule_id: str
    points_awarded: float


@dataclass(frozen=True)
class FairAssessment:
    """Final sub-scores plus how each one came to be."""

    sub_scores: FairSubScores
    computed: FairSubScores
    provenance: dict[str, str]
    rule_trace: tuple[TraceEntry, ...]
    overrides_applied: tuple[CuratorOverride, ...] = field(default=())


# --- predicates -----------------------------------------------------------
#
# A predicate maps metadata to a multiplier in [0, 1]; rule tables refer
# to predicates by name so a policy file can rearrange points without
# touching code.

def _persistent_identifier(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.identifier_scheme in PERSISTENT_ID_SCHEMES else 0.0


def _rich_metadata(m: ObjectMetadata, rules: "QualityRules") -> float:
    rich = (
        bool(m.title)
        and m.description_chars >= RICH_DESCRIPTION_MIN_CHARS
        and len(m.keywords) >= RICH_KEYWORDS_MIN
    )
    return 1.0 if rich else 0.0


def _access_url_present(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.access_url else 0.0


def _open_license(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.license_id and m.license_id in rules.open_licenses else 0.0


def _https_protocol(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.access_protocol == "https" else 0.0


def _standard_format(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if any(f in rules.standard_formats for f in m.formats) else 0.0


def _standard_schema(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.uses_standard_schema else 0.0


def _license_present(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.license_id else 0.0


def _provenance_recorded(m: ObjectMetadata, rules: "QualityRules") -> float:
    return 1.0 if m.has_provenance else 0.0


def _metadata_completeness(m: ObjectMetadata, rules: "QualityRules") -> float:
    return float(m.completeness_ratio)


PREDICATES: dict[str, Callable[[ObjectMetadata, "QualityRules"], float]] = {
    "persistent_identifier": _persistent_identifier,
    "rich_metadata": _rich_metadata,
    "access_url_present": _access_url_present,
    "open_license": _open_license,
    "https_protocol": _https_protocol,
    "standard_format": _standard_format,
    "standard_schema": _standard_schema,
    "license_present": _license_present,
    "provenance_recorded": _provenance_recorded,
    "metadata_completeness": _metadata_completeness,
}


@dataclass(frozen=True)
class Rule:
    rule_id: str
    predicate: str
    points: float


@dataclass(frozen=True)
class RuleSet:
    """Validated per-dimension rule tables."""

    dimensions: dict[str, tuple[Rule, ...]]
    version: str = RULES_SCHEMA

    @classmethod
    def from_mapping(cls, data: Mapping) -> "RuleSet":
        if not isinstance(data, Mapping):
            raise RuleFileError("rule file must be a JSON object")
        schema = data.get("schema")
        if schema != RULES_SCHEMA:
            raise RuleFileError(f"rule file schema must be {RULES_SCHEMA!r}, got {schema!r}")
        raw_dimensions = data.get("dimensions")
        if not isinstance(raw_dimensions, Mapping):
            raise RuleFileError("rule file must carry a 'dimensions' object")
        unknown = sorted(set(raw_dimensions) - set(DIMENSIONS))
        if unknown:
            raise RuleFileError(f"unknown dimensions in rule file: {unknown}")
        missing = [d for d in DIMENSIONS if d not in raw_dimensions]
        if missing:
            raise RuleFileError(f"rule file missing dimensions: {missing}")

        seen_ids: set[str] = set()
        dimensions: dict[str, tuple[Rule, ...]] = {}
        for dim in DIMENSIONS:
            entries = raw_dimensions[dim]
            if not isinstance(entries, Sequence) or isinstance(entries, (str, bytes)) or not entries:
                raise RuleFileError(f"dimension {dim} must list at least one rule")
            rules = []
            total = 0.0
            for entry in entries:
                if not isinstance(entry, Mapping):
                    raise RuleFileError(f"dimension {dim}: each rule must be an object")
                rule_id = entry.get("rule_id")
                predicate = entry.get("predicate")
                points = entry.get("points")
                if not rule_id or not isinstance(rule_id, str):
                    raise RuleFileError(f"dimension {dim}: rule_id must be a nonempty string")
                if rule_id in seen_ids:
                    raise RuleFileError(f"duplicate rule_id {rule_id!r}")
                seen_ids.add(rule_id)
                if predicate not in PREDICATES:
                    raise RuleFileError(
                        f"rule {rule_id!r}: unknown predicate {predicate!r} "
                        f"(known: {sorted(PREDICATES)})"
                    )
                if (
                    not isinstance(points, (int, float))
                    or isinstance(points, bool)
                    or not math.isfinite(points)
                    or points < 0.0
                ):
                    raise RuleFileError(f"rule {rule_id!r}: points must be a finite number >= 0")
                rules.append(Rule(rule_id=rule_id, predicate=predicate, points=float(points)))
                total += float(points)
            if abs(total - 1.0) > POINTS_SUM_TOLERANCE:
                raise RuleFileError(f"dimension {dim}: rule points must sum to 1.0, got {total!r}")
            dimensions[dim] = tuple(rules)
        return cls(dimensions=dimensions)

    @classmethod
    def from_file(cls, path: str | Path) -> "RuleSet":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise RuleFileError(f"cannot read rule file {path}: {exc}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RuleFileError(f"rule file {path} is not valid JSON: {exc}")
        return cls.from_mapping(data)


def default_ruleset() -> RuleSet:
    """The built-in rule table, shipped as package data."""
    text = resources.files("qic").joinpath("data/default_rules.json").read_text(encoding="utf-8")
    return RuleSet.from_mapping(json.loads(text))


class QualityRules:
    """A rule table bound to the configurable license/format lists."""

    def __init__(
        self,
        ruleset: RuleSet | None = None,
        open_licenses: Iterable[str] = DEFAULT_OPEN_LICENSES,
        standard_formats: Iterable[str] = DEFAULT_STANDARD_FORMATS,
    ) -> None:
        self.ruleset = ruleset if ruleset is not None else default_ruleset()
        self.open_licenses = frozenset(open_licenses)
        self.standard_formats = frozenset(standard_formats)

    def score_dimension(
        self, dimension: str, metadata: ObjectMetadata
    ) -> tuple[float, tuple[TraceEntry, ...]]:
        """Computed value of one dimension plus its rule trace.

        The value is the sequential sum of the trace's points, in rule
        order, so summing the trace reproduces it bit-exactly.
        """
        value = 0.0
        trace = []
        for rule in self.ruleset.dimensions[dimension]:
            awarded = rule.points * PREDICATES[rule.predicate](metadata, self)
            value += awarded
            trace.append(TraceEntry(dimension=dimension, rule_id=rule.rule_id, points_awarded=awarded))
        return value, tuple(trace)

    def assess(
        self, metadata: ObjectMetadata, overrides: Iterable[CuratorOverride] = ()
    ) -> FairAssessment:
        """Score all four dimensions, then apply curator overrides.

        Rules fire (and are traced) for every dimension regardless of
        overrides; a curated dimension's final value is the latest
        override's. Overrides must already be filtered to this object.
        """
        computed: dict[str, float] = {}
        trace: list[TraceEntry] = []
        for dim in DIMENSIONS:
            value, dim_trace = self.score_dimension(dim, metadata)
            computed[dim] = value
            trace.extend(dim_trace)

        final = dict(computed)
        provenance = {dim: COMPUTED for dim in DIMENSIONS}
        applied = []
        by_dimension: dict[str, list[CuratorOverride]] = {}
        for override in overrides:
            by_dimension.setdefault(override.dimension, []).append(override)
        for dim, candidates in sorted(by_dimension.items()):
            latest = max(candidates, key=lambda o: o.occurred_at)
            ties = [o for o in candidates if o.occurred_at == latest.occurred_at]
            values = {o.value for o in ties}
            if len(values) > 1:
                raise OverrideConflictError(
                    f"dimension {dim}: overrides at {latest.timestamp} disagree: {sorted(values)}"
                )
            final[dim] = latest.value
            provenance[dim] = CURATED
            applied.append(latest)

        return FairAssessment(
            sub_scores=FairSubScores(
                q_f=final["F"], q_a=final["A"], q_i=final["I"], q_r=final["R"]
            ),
            computed=FairSubScores(
                q_f=computed["F"], q_a=computed["A"], q_i=computed["I"], q_r=computed["R"]
            ),
            provenance=provenance,
            rule_trace=tuple(trace),
            overrides_applied=tuple(applied),
        )


def assess_findability(metadata: ObjectMetadata, rules: QualityRules | None = None) -> float:
    """Findability sub-score under the default (or given) rule table."""
    return (rules or QualityRules()).score_dimension("F", metadata)[0]


def assess_accessibility(metadata: ObjectMetadata, rules: QualityRules | None = None) -> float:
    """Accessibility sub-score under the default (or given) rule table."""
    return (rules or QualityRules()).score_dimension("A", metadata)[0]


def assess_interoperability(metadata: ObjectMetadata, rules: QualityRules | None = None) -> float:
    """Interoperability sub-score under the default (or given) rule table."""
    return (rules or QualityRules()).score_dimension("I", metadata)[0]


def assess_reusability(metadata: ObjectMetadata, rules: QualityRules | None = None) -> float:
    """Reusability sub-score under the default (or given) rule table."""
    return (rules or QualityRules()).score_dimension("R", metadata)[0]


def assess(
    metadata: ObjectMetadata,
    overrides: Iterable[CuratorOverride] = (),
    rules: QualityRules | None = None,
) -> FairAssessment:
    """Full four-dimension assessment; see `QualityRules.assess`."""
    return (rules or QualityRules()).assess(metadata, overrides)
