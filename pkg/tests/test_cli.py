"""Command-line interface: exit codes, output shapes, and determinism."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest
from personas import ALJAMIL, FLAGSHIP, SINGH, SOIL

from qic.cli import main
from qic.config import ENV_CONFIG
from qic.graph import KnowledgeGraph
from qic.ingest import bundled_personas_dir
from qic.monitor import recompute

PERSONAS = bundled_personas_dir()


def ingest_args(graph_path) -> list[str]:
    return [
        "--graph",
        str(graph_path),
        "ingest",
        "--objects",
        str(PERSONAS / "objects.jsonl"),
        "--events",
        str(PERSONAS / "events.jsonl"),
        "--overrides",
        str(PERSONAS / "overrides.jsonl"),
    ]


@pytest.fixture(scope="module")
def graph_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "graph.jsonl"
    assert main(ingest_args(path)) == 0
    return path


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- ingest ---------------------------------------------------------------------


def test_ingest_builds_graph_and_reports_counts(tmp_path, capsys):
    path = tmp_path / "graph.jsonl"
    code, out, err = run(capsys, *ingest_args(path))
    assert code == 0
    assert path.exists()
    assert "data_object" in out and "accepted" in out
    report = json.loads(
        run(capsys, "--graph", str(tmp_path / "again.jsonl"), "--format", "json",
            "ingest", "--objects", str(PERSONAS / "objects.jsonl"))[1]
    )
    assert report["counts"]["data_object"]["accepted"] == 4


def test_ingest_replay_deduplicates(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", str(graph_file), "--format", "json",
                       *ingest_args(graph_file)[2:])
    report = json.loads(out)
    assert code == 0
    assert report["counts"]["data_object"] == {
        "accepted": 0, "deduplicated": 4, "rejected": 0, "total": 4,
    }


def test_ingest_with_bad_lines_exits_partial(tmp_path, capsys):
    feed = tmp_path / "objects.jsonl"
    lines = (PERSONAS / "objects.jsonl").read_text(encoding="utf-8")
    feed.write_text(lines + "{broken\n", encoding="utf-8")
    code, out, _ = run(
        capsys, "--graph", str(tmp_path / "g.jsonl"), "ingest", "--objects", str(feed)
    )
    assert code == 2
    assert "invalid JSON" in out


def test_ingest_failures_exit_one(tmp_path, capsys):
    code, _, err = run(
        capsys,
        "--graph", str(tmp_path / "missing-dir" / "g.jsonl"),
        "ingest", "--objects", str(PERSONAS / "objects.jsonl"),
    )
    assert code == 1 and "error:" in err
    code, _, err = run(
        capsys,
        "--graph", str(tmp_path / "g.jsonl"),
        "ingest", "--objects", str(tmp_path / "nope.jsonl"),
    )
    assert code == 1 and "error:" in err


# -- score ----------------------------------------------------------------------


def test_score_object_matches_library_numbers(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json", "score", "object", FLAGSHIP
    )
    assert code == 0
    payload = json.loads(out)
    report = recompute(KnowledgeGraph.load(graph_file))
    row = report.find_object(FLAGSHIP)
    assert payload["q"] == row.q
    assert payload["i"] == row.i
    assert payload["c"] == row.c
    assert payload["s"] == row.s
    assert payload["s"] == (payload["q"] * payload["i"]) * payload["c"]
    assert payload["reuse_events"] == 210


def test_score_object_table_lists_labels(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", str(graph_file), "score", "object", SOIL)
    assert code == 0
    for label in ("object_id", "q", "i", "c", "s", "curated", "events", "as_of"):
        assert label in out
    assert "0.000000" in out  # annihilated score


def test_score_object_as_of_rewinds(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json",
        "score", "object", FLAGSHIP, "--as-of", "2023-01-01",
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["i"] == 0.0 and payload["s"] == 0.0
    assert payload["as_of"] == "2023-01-01"


def test_score_object_not_found(graph_file, capsys):
    code, _, err = run(capsys, "--graph", str(graph_file), "score", "object", "doi:ghost")
    assert code == 3
    assert "doi:ghost" in err


def test_score_researcher(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json", "score", "researcher", SINGH
    )
    assert code == 0
    payload = json.loads(out)
    report = recompute(KnowledgeGraph.load(graph_file))
    assert payload["s_total"] == report.find_researcher(SINGH).s_total
    assert payload["contribution_count"] == 2
    assert set(payload["contributions"]) == set(report.find_researcher(SINGH).contributions)
    code, _, err = run(capsys, "--graph", str(graph_file), "score", "researcher", "orcid:ghost")
    assert code == 3


def test_score_on_missing_graph_exits_one(tmp_path, capsys):
    code, _, err = run(
        capsys, "--graph", str(tmp_path / "none.jsonl"), "score", "object", FLAGSHIP
    )
    assert code == 1 and "error:" in err


# -- rank -----------------------------------------------------------------------


def test_rank_top_two(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json", "rank", "--top", "2"
    )
    assert code == 0
    payload = json.loads(out)
    assert [row["researcher_id"] for row in payload["ranking"]] == [SINGH, ALJAMIL]
    assert [row["rank"] for row in payload["ranking"]] == [1, 2]


def test_rank_rejects_nonpositive_top(graph_file, capsys):
    code, _, err = run(capsys, "--graph", str(graph_file), "rank", "--top", "0")
    assert code == 1  # command-line usage failure


def test_rank_table_output(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", str(graph_file), "rank", "--top", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["rank", "researcher_id", "s_total", "objects"]
    assert lines[1].split()[1] == SINGH


# -- explain --------------------------------------------------------------------


def test_explain_json_decomposition(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json", "explain", FLAGSHIP
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["s"] == (payload["q"] * payload["i"]) * payload["c"]
    assert len(payload["events"]) == 210
    assert payload["provenance"]["R"] == "curated"
    assert payload["n_authors"] == 2


def test_explain_table_shows_the_arithmetic(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", str(graph_file), "explain", SOIL)
    assert code == 0
    assert "s = (q * i) * c" in out
    assert "zero_reuse_policy=annihilate" in out
    assert "collaboration: 12 authors, 6 institutions" in out


def test_explain_not_found(graph_file, capsys):
    code, _, err = run(capsys, "--graph", str(graph_file), "explain", "doi:ghost")
    assert code == 3


# -- snapshot -------------------------------------------------------------------


def test_snapshot_series(graph_file, capsys):
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--format", "json",
        "snapshot", "--dates", "2023-06-01,2024-06-01",
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    entries = [json.loads(line) for line in lines]
    assert [e["as_of"] for e in entries] == ["2023-06-01", "2024-06-01"]
    assert all(len(e["digest"]) == 64 for e in entries)


def test_snapshot_rejects_unordered_or_empty_dates(graph_file, capsys):
    code, _, err = run(
        capsys, "--graph", str(graph_file), "snapshot", "--dates", "2024-06-01,2023-06-01"
    )
    assert code == 1 and "increasing" in err
    code, _, err = run(capsys, "--graph", str(graph_file), "snapshot", "--dates", " , ")
    assert code == 1
    code, _, err = run(capsys, "--graph", str(graph_file), "snapshot")
    assert code == 1  # --dates is required


# -- config-validate ---------------------------------------------------------------


def test_config_validate_defaults_are_valid(capsys):
    code, out, _ = run(capsys, "config-validate")
    assert code == 0
    assert "defaults" in out


def test_config_validate_accepts_valid_file(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"schema": "config@1"}), encoding="utf-8")
    code, out, _ = run(capsys, "--config", str(config), "config-validate")
    assert code == 0
    assert str(config) in out
    code, out, _ = run(capsys, "--config", str(config), "--format", "json", "config-validate")
    assert json.loads(out)["zero_reuse_policy"] == "annihilate"


def test_config_validate_names_violations(tmp_path, capsys):
    bad_weights = tmp_path / "bad.json"
    bad_weights.write_text(
        json.dumps(
            {"schema": "config@1", "fair_weights": {"F": 0.4, "A": 0.2, "I": 0.2, "R": 0.1}}
        ),
        encoding="utf-8",
    )
    code, _, err = run(capsys, "--config", str(bad_weights), "config-validate")
    assert code == 4
    assert "violation:" in err and "1.0" in err

    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(
        json.dumps({"schema": "config@1", "reuse_weights": {}}), encoding="utf-8"
    )
    code, _, err = run(capsys, "--config", str(unknown_key), "config-validate")
    assert code == 4
    assert "reuse_weights" in err


def test_config_validate_missing_file_is_io_failure(tmp_path, capsys):
    code, _, err = run(capsys, "--config", str(tmp_path / "none.json"), "config-validate")
    assert code == 1


def test_config_env_var_honored_and_flag_wins(tmp_path, capsys, monkeypatch):
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"schema": "config@1", "bogus": 1}), encoding="utf-8")
    valid = tmp_path / "valid.json"
    valid.write_text(json.dumps({"schema": "config@1"}), encoding="utf-8")
    monkeypatch.setenv(ENV_CONFIG, str(invalid))
    code, _, _ = run(capsys, "config-validate")
    assert code == 4  # picked up from the environment
    code, _, _ = run(capsys, "--config", str(valid), "config-validate")
    assert code == 0  # explicit flag wins


def test_config_changes_scores(graph_file, tmp_path, capsys):
    formula = tmp_path / "formula.json"
    formula.write_text(
        json.dumps({"schema": "config@1", "zero_reuse_policy": "formula"}), encoding="utf-8"
    )
    code, out, _ = run(
        capsys, "--graph", str(graph_file), "--config", str(formula),
        "--format", "json", "score", "object", SOIL,
    )
    payload = json.loads(out)
    assert payload["i"] == 1.0
    assert payload["s"] > 0.0


# -- plumbing -------------------------------------------------------------------


def test_json_output_is_byte_identical_across_runs(graph_file, capsys):
    argv = ["--graph", str(graph_file), "--format", "json", "rank", "--top", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_verbose_notes_go_to_stderr(graph_file, capsys):
    code, out, err = run(capsys, "--graph", str(graph_file), "-v", "rank", "--top", "1")
    assert code == 0
    assert "graph:" in err
    assert "graph:" not in out


def test_unknown_command_is_usage_failure(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1


def test_module_entry_point_runs(graph_file):
    result = subprocess.run(
        [sys.executable, "-m", "qic", "--graph", str(graph_file), "score", "object", FLAGSHIP],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert FLAGSHIP in result.stdout
