"""Engine configuration: weights, policies, and rule-file binding.

A config file is a JSON object with a ``schema`` of ``config@1``;
every other key is optional and overrides one default:

``fair_weights``        object with keys F, A, I, R summing to 1.0
``reuse_kind_weights``  object mapping reuse event kind -> weight >= 0
``zero_reuse_policy``   "annihilate" (default) or "formula"
``rule_file``           path to a scoring rule file (default: bundled)
``open_licenses``       list of SPDX-style license ids
``standard_formats``    list of media types

Unknown keys are refused by name, so typos surface instead of being
silently ignored. The environment variable ``QIC_CONFIG`` may supply
the config path; an explicit path argument wins over it.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ConfigError, QicError
from .fair import (
    DEFAULT_OPEN_LICENSES,
    DEFAULT_STANDARD_FORMATS,
    QualityRules,
    RuleSet,
)
from .metrics import FORMULA, ZERO_REUSE_POLICIES, FairWeights

CONFIG_SCHEMA = "config@1"
ENV_CONFIG = "QIC_CONFIG"

DEFAULT_REUSE_KIND_WEIGHTS = {
    "citation": 1.0,
    "derived_dataset": 1.0,
    "mention": 0.25,
    "download_batch": 0.1,
}

_KNOWN_KEYS = (
    "schema",
    "fair_weights",
    "reuse_kind_weights",
    "zero_reuse_policy",
    "rule_file",
    "open_licenses",
    "standard_formats",
)


def _checked_weight(kind: str, value) -> float:
    if (
        not isinstance(value, (int, float))
        or isinstance(value, bool)
        or not math.isfinite(value)
        or value < 0.0
    ):
        raise ConfigError(
            f"reuse_kind_weights[{kind!r}] must be a finite number >= 0, got {value!r}"
        )
    return float(value)


def _checked_names(key: str, value) -> tuple[str, ...]:
    if (
        not isinstance(value, (list, tuple))
        or not value
        or not all(isinstance(item, str) and item for item in value)
    ):
        raise ConfigError(f"{key} must be a nonempty list of nonempty strings")
    return tuple(value)


@dataclass(frozen=True)
class EngineConfig:
    """Validated scoring configuration; immutable once built."""

    fair_weights: FairWeights = field(default_factory=FairWeights)
    reuse_kind_weights: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_REUSE_KIND_WEIGHTS)
    )
    zero_reuse_policy: str = "annihilate"
    rule_file: str | None = None
    open_licenses: tuple[str, ...] = tuple(DEFAULT_OPEN_LICENSES)
    standard_formats: tuple[str, ...] = tuple(DEFAULT_STANDARD_FORMATS)

    def __post_init__(self) -> None:
        if self.zero_reuse_policy not in ZERO_REUSE_POLICIES:
            raise ConfigError(
                f"zero_reuse_policy must be one of {sorted(ZERO_REUSE_POLICIES)}, "
                f"got {self.zero_reuse_policy!r}"
            )
        if not isinstance(self.reuse_kind_weights, Mapping) or not self.reuse_kind_weights:
            raise ConfigError("reuse_kind_weights must be a nonempty mapping")
        checked = {
            kind: _checked_weight(kind, value)
            for kind, value in self.reuse_kind_weights.items()
        }
        object.__setattr__(self, "reuse_kind_weights", checked)
        object.__setattr__(self, "open_licenses", _checked_names("open_licenses", self.open_licenses))
        object.__setattr__(
            self, "standard_formats", _checked_names("standard_formats", self.standard_formats)
        )

    @property
    def formula_at_zero(self) -> bool:
        """True when zero total reuse scores 1.0 instead of 0."""
        return self.zero_reuse_policy == FORMULA

    def quality_rules(self) -> QualityRules:
        """The FAIR rule engine this config selects."""
        ruleset = RuleSet.from_file(self.rule_file) if self.rule_file else None
        return QualityRules(
            ruleset=ruleset,
            open_licenses=self.open_licenses,
            standard_formats=self.standard_formats,
        )

    def to_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "fair_weights": {
                "F": self.fair_weights.w_f,
                "A": self.fair_weights.w_a,
                "I": self.fair_weights.w_i,
                "R": self.fair_weights.w_r,
            },
            "reuse_kind_weights": dict(sorted(self.reuse_kind_weights.items())),
            "zero_reuse_policy": self.zero_reuse_policy,
            "rule_file": self.rule_file,
            "open_licenses": sorted(self.open_licenses),
            "standard_formats": sorted(self.standard_formats),
        }


def _fair_weights_from(data) -> FairWeights:
    if not isinstance(data, Mapping):
        raise ConfigError("fair_weights must be an object with keys F, A, I, R")
    unknown = sorted(set(data) - set("FAIR"))
    if unknown:
        raise ConfigError(f"fair_weights has unknown keys: {unknown}")
    missing = sorted(set("FAIR") - set(data))
    if missing:
        raise ConfigError(f"fair_weights is missing keys: {missing}")
    return FairWeights(w_f=data["F"], w_a=data["A"], w_i=data["I"], w_r=data["R"])


def config_from_mapping(data: Mapping) -> EngineConfig:
    """Build a validated EngineConfig from parsed config-file content."""
    if not isinstance(data, Mapping):
        raise ConfigError("config file must be a JSON object")
    schema = data.get("schema")
    if schema != CONFIG_SCHEMA:
        raise ConfigError(f"config schema must be {CONFIG_SCHEMA!r}, got {schema!r}")
    unknown = sorted(set(data) - set(_KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    kwargs: dict = {}
    if "fair_weights" in data:
        kwargs["fair_weights"] = _fair_weights_from(data["fair_weights"])
    if "reuse_kind_weights" in data:
        kwargs["reuse_kind_weights"] = data["reuse_kind_weights"]
    if "zero_reuse_policy" in data:
        kwargs["zero_reuse_policy"] = data["zero_reuse_policy"]
    if "rule_file" in data and data["rule_file"] is not None:
        rule_file = data["rule_file"]
        if not isinstance(rule_file, str) or not rule_file:
            raise ConfigError("rule_file must be a nonempty path string")
        kwargs["rule_file"] = rule_file
    if "open_licenses" in data:
        kwargs["open_licenses"] = _checked_names("open_licenses", data["open_licenses"])
    if "standard_formats" in data:
        kwargs["standard_formats"] = _checked_names("standard_formats", data["standard_formats"])
    try:
        return EngineConfig(**kwargs)
    except QicError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc))


def config_from_file(path: str | Path) -> EngineConfig:
    """Load and validate a config file; content errors are ConfigError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    try:
        return config_from_mapping(data)
    except QicError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc))


def load_config(path: str | Path | None = None, environ: Mapping[str, str] | None = None) -> EngineConfig:
    """Resolve the active config: explicit path, then QIC_CONFIG, then defaults."""
    env = os.environ if environ is None else environ
    chosen = path or env.get(ENV_CONFIG)
    if chosen:
        return config_from_file(chosen)
    return EngineConfig()


def validate_config_file(path: str | Path) -> tuple[EngineConfig | None, list[str]]:
    """Validation-report form of `config_from_file` for the CLI.

    Returns (config, []) when the file is valid, else (None, violations).
    I/O failures still raise, so callers can distinguish an unreadable
    file from an invalid one.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return None, [f"config file {path} is not valid JSON: {exc}"]
    try:
        config = config_from_mapping(data)
    except QicError as exc:
        return None, [str(exc)]
    violations = []
    if config.rule_file:
        try:
            config.quality_rules()
        except QicError as exc:
            violations.append(str(exc))
    if violations:
        return None, violations
    return config, []
