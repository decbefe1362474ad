"""Scoring primitives for shared research-data objects.

Every score is a pure function of its inputs:

    quality        weighted average of the four FAIR sub-scores, in [0, 1]
    impact         1 + ln(1 + total reuse weight), or 0 for unused objects
    collaboration  (1 + ln(authors)) * (1 + 0.5 * ln(institutions)), >= 1
    object score   quality * impact * collaboration
    researcher     sum of object scores over everything they contributed to

The multiplicative object score means a never-reused object (impact 0
under the default zero-reuse policy) contributes nothing, no matter how
good its metadata is, and likewise for quality 0.

All arithmetic is IEEE-754 double precision, and sums run left to right
over their inputs, so results are bit-reproducible. Callers that need a
canonical order sort before calling; the monitoring engine orders reuse
events by (date, source, kind) and contributions by object id.

Everything here is safe to call concurrently: no shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    ConfigError,
    InvalidComponentError,
    InvalidCountError,
    InvalidReuseWeightError,
    InvalidSubScoreError,
    InvalidWeightsError,
)

#: Zero-reuse policies: ``annihilate`` maps zero total reuse weight to an
#: impact of 0 (an unused object scores nothing); ``formula`` applies
#: 1 + ln(1 + total) everywhere, which yields 1 at zero reuse.
ANNIHILATE = "annihilate"
FORMULA = "formula"
ZERO_REUSE_POLICIES = (ANNIHILATE, FORMULA)

#: Absolute tolerance on the FAIR weight sum.
WEIGHT_SUM_TOLERANCE = 1e-9


def _require_finite_fraction(value: float, what: str, exc: type[Exception]) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise exc(f"{what} must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise exc(f"{what} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class FairWeights:
    """Weights of the four FAIR dimensions; nonnegative, summing to 1."""

    w_f: float = 0.25
    w_a: float = 0.25
    w_i: float = 0.25
    w_r: float = 0.25

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidWeightsError(f"weight {name} must be a number, got {value!r}")
            if not math.isfinite(value) or value < 0.0:
                raise InvalidWeightsError(f"weight {name} must be finite and >= 0, got {value!r}")
        total = ((self.w_f + self.w_a) + self.w_i) + self.w_r
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidWeightsError(f"fair weights must sum to 1.0, got {total!r}")

    def as_dict(self) -> dict[str, float]:
        return {"w_f": self.w_f, "w_a": self.w_a, "w_i": self.w_i, "w_r": self.w_r}


@dataclass(frozen=True)
class FairSubScores:
    """Per-dimension FAIR sub-scores, each in [0, 1]."""

    q_f: float
    q_a: float
    q_i: float
    q_r: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            _require_finite_fraction(value, f"sub-score {name}", InvalidSubScoreError)

    def as_dict(self) -> dict[str, float]:
        return {"q_f": self.q_f, "q_a": self.q_a, "q_i": self.q_i, "q_r": self.q_r}


@dataclass(frozen=True)
class CollaborationCounts:
    """Distinct contributor and institution counts for one object.

    An author may list several affiliations, so institutions can exceed
    authors; both counts are at least 1.
    """

    n_authors: int
    n_institutions: int

    def __post_init__(self) -> None:
        for name, value in (("n_authors", self.n_authors), ("n_institutions", self.n_institutions)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidCountError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class ObjectScore:
    """Decomposed score of one data object: quality * impact * collaboration."""

    quality: float
    impact: float
    collaboration: float
    score: float

    def __post_init__(self) -> None:
        _require_finite_fraction(self.quality, "quality", InvalidComponentError)
        if not math.isfinite(self.impact) or self.impact < 0.0:
            raise InvalidComponentError(f"impact must be finite and >= 0, got {self.impact!r}")
        if not math.isfinite(self.collaboration) or self.collaboration < 1.0:
            raise InvalidComponentError(
                f"collaboration must be finite and >= 1, got {self.collaboration!r}"
            )
        expected = (self.quality * self.impact) * self.collaboration
        if self.score != expected:
            raise InvalidComponentError(
                f"score {self.score!r} does not equal quality*impact*collaboration {expected!r}"
            )


@dataclass(frozen=True)
class ResearcherIndex:
    """A researcher's total score and its per-object decomposition."""

    researcher_id: str
    s_total: float
    contributions: tuple[tuple[str, ObjectScore], ...] = field(default=())


def quality_score(sub: FairSubScores, weights: FairWeights) -> float:
    """Weighted average of the four FAIR sub-scores.

    Accumulates left to right (F, A, I, R) for reproducibility. The result
    lies in [min sub-score, max sub-score], hence in [0, 1].
    """
    return (
        (weights.w_f * sub.q_f + weights.w_a * sub.q_a) + weights.w_i * sub.q_i
    ) + weights.w_r * sub.q_r


def impact_score(
    weights: Iterable[float], *, zero_reuse_policy: str = ANNIHILATE
) -> float:
    """Log-tempered accumulation of reuse-event weights.

    ``1 + ln(1 + total)`` grows without bound but concavely, so a run of
    reuse keeps counting while a single viral outlier cannot dominate.
    With no reuse at all the default policy returns 0 rather than the
    formula's 1, so unused objects contribute nothing downstream.
    """
    if zero_reuse_policy not in ZERO_REUSE_POLICIES:
        raise ConfigError(
            f"zero_reuse_policy must be one of {ZERO_REUSE_POLICIES}, got {zero_reuse_policy!r}"
        )
    total = 0.0
    for k, w in enumerate(weights):
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not math.isfinite(w):
            raise InvalidReuseWeightError(f"reuse weight #{k} must be a finite number, got {w!r}")
        if w < 0.0:
            raise InvalidReuseWeightError(f"reuse weight #{k} must be >= 0, got {w!r}")
        total += w
    if total == 0.0 and zero_reuse_policy == ANNIHILATE:
        return 0.0
    return 1.0 + math.log(1.0 + total)


def collaboration_score(counts: CollaborationCounts) -> float:
    """Breadth of the team behind an object.

    ``(1 + ln(authors)) * (1 + 0.5 * ln(institutions))``: exactly 1 for a
    solo single-institution object, strictly increasing in each count,
    with the institution factor rewarding multi-institution efforts.
    """
    return (1.0 + math.log(counts.n_authors)) * (
        1.0 + 0.5 * math.log(counts.n_institutions)
    )


def object_score(quality: float, impact: float, collaboration: float) -> ObjectScore:
    """Combine the three components into one object score."""
    return ObjectScore(
        quality=quality,
        impact=impact,
        collaboration=collaboration,
        score=(quality * impact) * collaboration,
    )


def researcher_index(
    researcher_id: str, contributions: Iterable[tuple[str, ObjectScore]]
) -> ResearcherIndex:
    """Sum object scores over a researcher's contributions.

    Every contributor of an object receives that object's full score;
    there is no fractional credit splitting. The sum runs left to right
    over ``contributions`` as given.
    """
    items = tuple(contributions)
    total = 0.0
    for _, contribution in items:
        total += contribution.score
    return ResearcherIndex(researcher_id=researcher_id, s_total=total, contributions=items)
