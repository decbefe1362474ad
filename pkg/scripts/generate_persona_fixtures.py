#!/usr/bin/env python3
"""Regenerate the bundled persona fixture files.

Two contrasting researchers, mirroring the acceptance scenario:

* Dr. Singh — a small-team flagship dataset with heavy citation reuse
  plus a solo scripts package with moderate reuse. High impact, low
  collaboration breadth.
* Dr. Al-Jamil — two large consortium datasets (18 and 12 authors
  across many institutions), one with light reuse and one with none.
  High collaboration breadth, low impact; the zero-reuse object scores
  0 under the default policy.

The streams also exercise the full record surface: curator overrides
(two on the same dimension, later timestamp winning) and one reuse
event with a per-event weight override. Output is deterministic, so
the files only change when this script does.

Usage: python scripts/generate_persona_fixtures.py
"""

from __future__ import annotations

import json
from datetime import date, timedelta
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "qic" / "fixtures" / "personas"

SINGH = "orcid:0000-0002-1825-0097"
SINGH_COAUTHOR = "orcid:0000-0004-1000-0002"
ALJAMIL = "orcid:0000-0001-5000-0001"
STEWARD = "orcid:0000-0009-9000-0001"

FLAGSHIP = "doi:10.5555/singh-coral-atlas"
SCRIPTS = "doi:10.5555/singh-reef-scripts"
CLIMATE = "doi:10.5555/aljamil-climate-grid"
SOIL = "doi:10.5555/aljamil-soil-archive"


def consortium(n: int) -> list[str]:
    return [f"orcid:0000-0004-2000-{k:04d}" for k in range(1, n + 1)]


def contributor(researcher: str, institution: str | None) -> dict:
    entry: dict = {"researcher_id": researcher}
    if institution:
        entry["institution_id"] = institution
    return entry


def data_object(object_id: str, title: str, published: str, contributors: list, metadata: dict) -> dict:
    return {
        "schema": "data_object@1",
        "id": object_id,
        "title": title,
        "repository": "fixture-repository",
        "published": published,
        "contributors": contributors,
        "metadata": metadata,
    }


def metadata(
    description_chars: int,
    keywords: list[str],
    completeness_ratio: float,
    formats: list[str],
    uses_standard_schema: bool = True,
) -> dict:
    return {
        "identifier_scheme": "doi",
        "title": "present",
        "description_chars": description_chars,
        "keywords": keywords,
        "license_id": "CC-BY-4.0",
        "access_url": "https://fixture-repository.example/download",
        "access_protocol": "https",
        "formats": formats,
        "uses_standard_schema": uses_standard_schema,
        "has_provenance": True,
        "completeness_ratio": completeness_ratio,
    }


def event(object_id: str, kind: str, source_id: str, occurred: date, weight_override: float | None = None) -> dict:
    record: dict = {
        "schema": "reuse_event@1",
        "data_object_id": object_id,
        "kind": kind,
        "source_id": source_id,
        "occurred": occurred.isoformat(),
    }
    if weight_override is not None:
        record["weight_override"] = weight_override
    return record


def override(object_id: str, dimension: str, value: float, curator: str, timestamp: str) -> dict:
    return {
        "schema": "curator_override@1",
        "object_id": object_id,
        "dimension": dimension,
        "value": value,
        "curator_id": curator,
        "timestamp": timestamp,
    }


def build_objects() -> list[dict]:
    climate_team = [contributor(ALJAMIL, "ror:inst-01")]
    for k, researcher in enumerate(consortium(17)):
        climate_team.append(contributor(researcher, f"ror:inst-{(k % 8) + 1:02d}"))

    soil_team = [contributor(ALJAMIL, "ror:inst-01"), contributor(STEWARD, "ror:inst-02")]
    for k, researcher in enumerate(consortium(10)):
        soil_team.append(contributor(researcher, f"ror:inst-{(k % 6) + 1:02d}"))

    return [
        data_object(
            FLAGSHIP,
            "Coral reef survey atlas, 2010-2022",
            "2022-11-03",
            [contributor(SINGH, "ror:inst-09"), contributor(SINGH_COAUTHOR, "ror:inst-09")],
            metadata(512, ["coral", "reef", "survey", "ocean", "atlas"], 1.0,
                     ["text/csv", "application/x-netcdf"]),
        ),
        data_object(
            SCRIPTS,
            "Reef survey processing scripts",
            "2023-03-17",
            [contributor(SINGH, "ror:inst-09")],
            metadata(340, ["reef", "processing", "scripts", "matlab"], 0.75,
                     ["application/x-matlab"], uses_standard_schema=False),
        ),
        data_object(
            CLIMATE,
            "Gridded climate reanalysis ensemble",
            "2023-09-21",
            climate_team,
            metadata(480, ["climate", "reanalysis", "gridded", "ensemble", "temperature", "precipitation"],
                     0.9, ["text/csv"]),
        ),
        data_object(
            SOIL,
            "Continental soil carbon archive",
            "2024-01-12",
            soil_team,
            metadata(420, ["soil", "carbon", "archive", "survey", "cores"], 0.8,
                     ["application/x-parquet"]),
        ),
    ]


def build_events() -> list[dict]:
    events = []
    start = date(2023, 1, 10)
    for k in range(200):
        events.append(
            event(FLAGSHIP, "citation", f"doi:10.1234/cite-f-{k + 1:04d}", start + timedelta(days=3 * k))
        )
    mention_dates = ["2023-05-04", "2023-08-19", "2023-12-02", "2024-03-11", "2024-05-27", "2024-07-08"]
    for k, when in enumerate(mention_dates):
        events.append(event(FLAGSHIP, "mention", f"web:reef-watch-blog/post-{k + 1:02d}", date.fromisoformat(when)))
    batches = [("2023-12-31", "2023-Q4"), ("2024-03-31", "2024-Q1"),
               ("2024-06-30", "2024-Q2"), ("2024-09-30", "2024-Q3")]
    for k, (when, quarter) in enumerate(batches):
        overridden = 0.2 if k == 3 else None
        events.append(
            event(FLAGSHIP, "download_batch", f"usage:repo9/{quarter}", date.fromisoformat(when),
                  weight_override=overridden)
        )
    start = date(2023, 6, 1)
    for k in range(60):
        events.append(
            event(SCRIPTS, "citation", f"doi:10.1234/cite-s-{k + 1:04d}", start + timedelta(days=7 * k))
        )
    events.append(event(CLIMATE, "mention", "web:climate-news/item-1", date(2024, 2, 14)))
    events.append(event(CLIMATE, "mention", "web:climate-news/item-2", date(2024, 5, 9)))
    for k, when in enumerate(["2024-03-31", "2024-06-30", "2024-09-30"]):
        events.append(event(CLIMATE, "download_batch", f"usage:repo1/2024-Q{k + 1}", date.fromisoformat(when)))
    return events


def build_overrides() -> list[dict]:
    return [
        override(FLAGSHIP, "R", 0.90, "curator:lee", "2024-04-02T09:30:00Z"),
        override(FLAGSHIP, "R", 0.95, "curator:osei", "2024-04-20T16:45:00Z"),
    ]


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_jsonl(OUT_DIR / "objects.jsonl", build_objects())
    write_jsonl(OUT_DIR / "events.jsonl", build_events())
    write_jsonl(OUT_DIR / "overrides.jsonl", build_overrides())
    print(f"wrote persona fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
