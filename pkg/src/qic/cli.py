"""Command-line surface for the scoring pipeline.

One binary, six subcommands: ``ingest`` parses JSONL record files into
the graph and persists it atomically, ``score object`` / ``score
researcher`` print one entity's numbers, ``rank`` lists the top
researchers, ``explain`` decomposes one object's score, ``snapshot``
recomputes over a date series, and ``config-validate`` checks a config
file and names every violated constraint.

Exit codes: 0 success; 1 I/O or configuration failure (including
command-line usage errors); 2 ingest completed with rejected records;
3 id not found; 4 config-validate found an invalid config. Output is
deterministic for fixed inputs — ``--format json`` is byte-identical
across runs. ``QIC_CONFIG`` may name the config file; ``--config``
wins over it.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import monitor
from .config import ENV_CONFIG, EngineConfig, load_config, validate_config_file
from .errors import QicError, UnknownNodeError
from .graph import KnowledgeGraph
from .ingest import ingest_files
from .monitor import ScoreReport

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2
EXIT_NOT_FOUND = 3
EXIT_INVALID = 4

DEFAULT_GRAPH = "qic.graph.jsonl"


@dataclass
class CliConfig:
    """Options shared by every subcommand."""

    graph_path: Path
    config_path: str | None
    output_format: str
    verbosity: int

    def load_engine_config(self) -> EngineConfig:
        return load_config(self.config_path)

    def note(self, message: str) -> None:
        if self.verbosity:
            click.echo(message, err=True)


def _fail(message: str, code: int) -> int:
    click.echo(f"error: {message}", err=True)
    return code


def _dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


@click.group()
@click.option(
    "--graph",
    "graph_path",
    type=click.Path(path_type=Path),
    default=DEFAULT_GRAPH,
    show_default=True,
    help="Graph file to read and write.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    envvar=ENV_CONFIG,
    help=f"Config file (falls back to ${ENV_CONFIG}, then defaults).",
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["json", "table"]),
    default="table",
    show_default=True,
    help="Output format.",
)
@click.option("-v", "--verbose", "verbosity", count=True, help="Chatty diagnostics on stderr.")
@click.pass_context
def cli(ctx: click.Context, graph_path: Path, config_path: Path | None, output_format: str, verbosity: int) -> None:
    """Score shared research data: quality x impact x collaboration."""
    ctx.obj = CliConfig(
        graph_path=graph_path,
        config_path=str(config_path) if config_path else None,
        output_format=output_format,
        verbosity=verbosity,
    )
    ctx.obj.note(f"graph: {graph_path}")
    ctx.obj.note(f"config: {ctx.obj.config_path or '(defaults)'}")


@cli.command("ingest")
@click.option("--objects", "object_paths", multiple=True, type=click.Path(path_type=Path))
@click.option("--events", "event_paths", multiple=True, type=click.Path(path_type=Path))
@click.option("--overrides", "override_paths", multiple=True, type=click.Path(path_type=Path))
@click.pass_obj
def cmd_ingest(
    state: CliConfig,
    object_paths: tuple[Path, ...],
    event_paths: tuple[Path, ...],
    override_paths: tuple[Path, ...],
) -> int:
    """Apply JSONL record files to the graph and persist it."""
    try:
        if state.graph_path.exists():
            graph = KnowledgeGraph.load(state.graph_path)
        else:
            graph = KnowledgeGraph()
        report = ingest_files(
            graph,
            object_paths=object_paths,
            event_paths=event_paths,
            override_paths=override_paths,
        )
        graph.save(state.graph_path)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    if state.output_format == "json":
        click.echo(_dump(report.to_dict()))
    else:
        click.echo(report.to_table(), nl=False)
    return EXIT_PARTIAL if report.total_rejected else EXIT_OK


def _recompute(state: CliConfig, as_of: str | None) -> ScoreReport:
    graph = KnowledgeGraph.load(state.graph_path)
    return monitor.recompute(graph, state.load_engine_config(), as_of=as_of)


@cli.group("score")
def cmd_score() -> None:
    """Print one entity's current score."""


@cmd_score.command("object")
@click.argument("object_id")
@click.option("--as-of", "as_of", default=None, help="Count reuse up to this date only.")
@click.pass_obj
def cmd_score_object(state: CliConfig, object_id: str, as_of: str | None) -> int:
    """Print q, i, c, s for one data object."""
    try:
        report = _recompute(state, as_of)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    row = report.find_object(object_id)
    if row is None:
        return _fail(f"object {object_id!r} is not in the graph", EXIT_NOT_FOUND)
    if state.output_format == "json":
        click.echo(_dump(row.to_dict() | {"as_of": report.as_of}))
    else:
        curated = "".join(d for d in "FAIR" if row.provenance.get(d) == "curated") or "-"
        for label, value in (
            ("object_id", row.object_id),
            ("q", f"{row.q:.6f}"),
            ("i", f"{row.i:.6f}"),
            ("c", f"{row.c:.6f}"),
            ("s", f"{row.s:.6f}"),
            ("curated", curated),
            ("events", row.reuse_events),
            ("as_of", report.as_of or "-"),
        ):
            click.echo(f"{label:<10} {value}")
    return EXIT_OK


@cmd_score.command("researcher")
@click.argument("researcher_id")
@click.option("--as-of", "as_of", default=None, help="Count reuse up to this date only.")
@click.pass_obj
def cmd_score_researcher(state: CliConfig, researcher_id: str, as_of: str | None) -> int:
    """Print one researcher's total score and contributions."""
    try:
        report = _recompute(state, as_of)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    row = report.find_researcher(researcher_id)
    if row is None:
        return _fail(f"researcher {researcher_id!r} is not in the graph", EXIT_NOT_FOUND)
    if state.output_format == "json":
        payload = row.to_dict() | {"contributions": list(row.contributions), "as_of": report.as_of}
        click.echo(_dump(payload))
    else:
        click.echo(f"{'researcher_id':<15} {row.researcher_id}")
        click.echo(f"{'s_total':<15} {row.s_total:.6f}")
        click.echo(f"{'as_of':<15} {report.as_of or '-'}")
        click.echo(f"{'contributions':<15} {row.contribution_count}")
        for object_id in row.contributions:
            click.echo(f"  {object_id}")
    return EXIT_OK


@cli.command("rank")
@click.option("--top", "top_n", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--as-of", "as_of", default=None, help="Count reuse up to this date only.")
@click.pass_obj
def cmd_rank(state: CliConfig, top_n: int, as_of: str | None) -> int:
    """List the top researchers by total score."""
    try:
        report = _recompute(state, as_of)
        rows = monitor.rank(report, top_n)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    if state.output_format == "json":
        payload = {
            "as_of": report.as_of,
            "ranking": [
                {"rank": position, **row.to_dict()}
                for position, row in enumerate(rows, start=1)
            ],
        }
        click.echo(_dump(payload))
    else:
        click.echo(f"{'rank':>4} {'researcher_id':<34} {'s_total':>12} {'objects':>7}")
        for position, row in enumerate(rows, start=1):
            click.echo(
                f"{position:>4} {row.researcher_id:<34} {row.s_total:>12.6f} {row.contribution_count:>7}"
            )
    return EXIT_OK


@cli.command("explain")
@click.argument("object_id")
@click.option("--as-of", "as_of", default=None, help="Count reuse up to this date only.")
@click.pass_obj
def cmd_explain(state: CliConfig, object_id: str, as_of: str | None) -> int:
    """Show everything behind one object's score."""
    try:
        report = _recompute(state, as_of)
        explanation = monitor.explain(report, object_id)
    except UnknownNodeError as exc:
        return _fail(str(exc), EXIT_NOT_FOUND)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    if state.output_format == "json":
        click.echo(_dump(explanation.to_dict() | {"as_of": report.as_of}))
        return EXIT_OK
    click.echo(f"object {explanation.object_id} (as_of {report.as_of or '-'})")
    click.echo(
        f"  s = (q * i) * c = ({explanation.q:.6f} * {explanation.i:.6f}) * "
        f"{explanation.c:.6f} = {explanation.s:.6f}"
    )
    click.echo("  quality:")
    for dim in "FAIR":
        source = explanation.provenance[dim]
        click.echo(
            f"    {dim}: {explanation.sub_scores[dim]:.6f} ({source}, weight "
            f"{explanation.fair_weights[dim]:.6f})"
        )
    for entry in explanation.rule_trace:
        click.echo(f"    rule {entry.rule_id}: +{entry.points_awarded:.6f} to {entry.dimension}")
    for override in explanation.overrides_applied:
        click.echo(
            f"    override {override.dimension}={override.value:.6f} "
            f"by {override.curator_id} at {override.timestamp}"
        )
    click.echo(
        f"  impact: total reuse weight {explanation.reuse_weight_total:.6f} over "
        f"{len(explanation.events)} events (zero_reuse_policy={explanation.zero_reuse_policy})"
    )
    for event in explanation.events:
        marker = " (override)" if event.overridden else ""
        click.echo(
            f"    {event.occurred} {event.event_kind} by {event.source_id}: "
            f"+{event.weight:.6f}{marker}"
        )
    click.echo(
        f"  collaboration: {explanation.n_authors} authors, "
        f"{explanation.n_institutions} institutions"
    )
    return EXIT_OK


@cli.command("snapshot")
@click.option(
    "--dates",
    "dates_text",
    required=True,
    help="Comma-separated, strictly increasing ISO dates.",
)
@click.pass_obj
def cmd_snapshot(state: CliConfig, dates_text: str) -> int:
    """Recompute scores at each of a series of as-of dates."""
    dates = [piece.strip() for piece in dates_text.split(",") if piece.strip()]
    if not dates:
        return _fail("--dates needs at least one date", EXIT_FAILURE)
    try:
        graph = KnowledgeGraph.load(state.graph_path)
        series = monitor.snapshot(graph, state.load_engine_config(), dates=dates)
    except (OSError, QicError) as exc:
        return _fail(str(exc), EXIT_FAILURE)
    if state.output_format == "json":
        click.echo(series.to_jsonl(), nl=False)
    else:
        click.echo(series.to_table(), nl=False)
    return EXIT_OK


@cli.command("config-validate")
@click.pass_obj
def cmd_config_validate(state: CliConfig) -> int:
    """Check the active config file; exit 4 when it is invalid."""
    if state.config_path is None:
        config = EngineConfig()
        if state.output_format == "json":
            click.echo(_dump(config.to_dict()))
        else:
            click.echo("config valid (built-in defaults)")
        return EXIT_OK
    try:
        config, violations = validate_config_file(state.config_path)
    except OSError as exc:
        return _fail(str(exc), EXIT_FAILURE)
    if violations:
        for violation in violations:
            click.echo(f"violation: {violation}", err=True)
        return EXIT_INVALID
    if state.output_format == "json":
        click.echo(_dump(config.to_dict()))
    else:
        click.echo(f"config valid: {state.config_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Console entry point; returns the process exit code."""
    try:
        result = cli.main(args=argv, prog_name="qic", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_FAILURE
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return EXIT_FAILURE
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
