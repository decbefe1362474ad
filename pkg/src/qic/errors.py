"""Exception types shared across the package."""


class QicError(Exception):
    """Base class for every error raised by this package."""


class InvalidWeightsError(QicError):
    """FAIR weights are negative or do not sum to 1."""


class InvalidSubScoreError(QicError):
    """A FAIR sub-score lies outside [0, 1]."""


class InvalidReuseWeightError(QicError):
    """A reuse-event weight is negative or not finite."""


class InvalidCountError(QicError):
    """An author or institution count is not a positive integer."""


class InvalidComponentError(QicError):
    """A quality/impact/collaboration component is out of range."""


class ConfigError(QicError):
    """Engine configuration is missing, malformed, or inconsistent."""


class RuleFileError(ConfigError):
    """A quality rule table failed validation at load time."""


class InvalidMetadataError(QicError):
    """Object metadata violates its field constraints."""


class OverrideConflictError(QicError):
    """Two curator overrides share a timestamp but disagree on the value."""


class UnknownNodeError(QicError):
    """A graph query referenced an id that is not in the graph."""


class KindConflictError(QicError):
    """An upsert tried to change the kind of an existing node."""


class MissingEndpointError(QicError):
    """An edge referenced a node that does not exist."""


class EdgeConstraintError(QicError):
    """An edge violated the kind/attribute schema for its edge kind."""


class ZeroContributorError(QicError):
    """A data object has no recorded contributors."""


class UnmappedEventKindError(QicError):
    """A reuse event kind has no configured weight."""


class GraphIntegrityError(QicError):
    """A graph file or in-memory graph failed an integrity check."""


class SchemaVersionError(GraphIntegrityError):
    """A graph file was written with an unsupported schema version."""


class UnknownAdapterError(QicError):
    """No source adapter is registered under the requested name."""


class AdapterError(QicError):
    """A source adapter failed to produce its record stream."""


class UnorderedDatesError(QicError):
    """A snapshot series was requested with non-increasing dates."""
