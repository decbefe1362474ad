"""Ids used by the bundled persona fixtures, shared across tests."""

SINGH = "orcid:0000-0002-1825-0097"
SINGH_COAUTHOR = "orcid:0000-0004-1000-0002"
ALJAMIL = "orcid:0000-0001-5000-0001"
STEWARD = "orcid:0000-0009-9000-0001"

FLAGSHIP = "doi:10.5555/singh-coral-atlas"
SCRIPTS = "doi:10.5555/singh-reef-scripts"
CLIMATE = "doi:10.5555/aljamil-climate-grid"
SOIL = "doi:10.5555/aljamil-soil-archive"
