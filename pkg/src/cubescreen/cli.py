"""Command-line entry point: ingest, screen, pivot, serve, watch, synth."""
from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .cube import Conjunction, CountCube, DateWindow, build_cube
from .errors import CubescreenError, EmptyScreen, SchemaMismatch
from .geo import CentroidTable, default_centroids, enumerate_region_sets
from .ingest import infer_schema, parse_events, serialize_events, summarize
from .pivot import pivot as build_pivot
from .pivot import row_argmax
from .schema import Schema
from .screen import (ScreeningConfig, massive_screen, prospective_screen,
                     reports_to_csv, reports_to_jsonl, reports_to_table1_csv)
from .synth import generate_synthetic, load_synthetic_config


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_manifest(out_dir: Path, command: str, inputs: dict,
                    config_text: str, outputs: list[Path]) -> None:
    manifest = {
        "tool": "cubescreen",
        "version": __version__,
        "command": command,
        "created": dt.datetime.now(dt.timezone.utc).isoformat(),
        "inputs": {str(p): _sha256(Path(p).read_bytes()) for p in inputs},
        "config_digest": _sha256(config_text.encode()),
        "outputs": {str(p): _sha256(Path(p).read_bytes()) for p in outputs},
    }
    manifest["digest"] = _sha256(json.dumps(
        {k: manifest[k] for k in ("inputs", "config_digest")},
        sort_keys=True).encode())
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_events(events_path: str, schema_path: Optional[str]):
    text = Path(events_path).read_text()
    if schema_path:
        schema = Schema.from_json(Path(schema_path).read_text())
    else:
        schema = infer_schema(text)
    records, errors = parse_events(text, schema)
    return records, errors, schema


def _parse_filter(text: str) -> Conjunction:
    """'attr=label' terms joined by ';', multi-label sets by '|'."""
    terms = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        attr, _, labels = part.partition("=")
        terms[attr.strip()] = {l.strip() for l in labels.split("|")}
    return Conjunction.from_dict(terms)


@click.group()
@click.version_option(__version__)
def main():
    """Index event records, screen for spatiotemporal anomalies, and
    explore conditional distributions."""


@main.command("ingest")
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--schema", "schema_path", type=click.Path(exists=True),
              help="Schema JSON; inferred from the data when omitted.")
@click.option("--out", type=click.Path(), help="Validated canonical CSV.")
@click.option("--summary", "summary_path", type=click.Path(),
              help="DatasetSummary JSON.")
def cmd_ingest(csv_path, schema_path, out, summary_path):
    """Parse and validate an event CSV; report summary statistics."""
    try:
        records, errors, schema = _load_events(csv_path, schema_path)
    except SchemaMismatch as e:
        raise click.ClickException(f"schema mismatch: {e}")
    for err in errors:
        click.echo(f"line {err.line}: {err.cause}", err=True)
    s = summarize(records, schema)
    click.echo(f"records: {s.total}  skipped: {len(errors)}")
    if s.age_mean is not None:
        click.echo(f"age mean: {s.age_mean:.2f}  sd: {s.age_sd:.2f}")
    if s.date_range:
        click.echo(f"dates: {s.date_range[0]} .. {s.date_range[1]}")
    outputs = []
    if out:
        Path(out).write_text(serialize_events(records, schema))
        outputs.append(Path(out))
    if summary_path:
        Path(summary_path).write_text(json.dumps(s.to_dict(), indent=2))
        outputs.append(Path(summary_path))
    if outputs:
        _write_manifest(Path(outputs[0]).parent, "ingest", [csv_path],
                        schema.to_json(), outputs)


@main.command("screen")
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True), help="ScreeningConfig JSON.")
@click.option("--schema", "schema_path", type=click.Path(exists=True))
@click.option("--centroids", "centroids_path", type=click.Path(exists=True),
              help="Centroid CSV; packaged table used when omitted.")
@click.option("--out", "out_prefix", required=True, type=click.Path(),
              help="Output prefix; writes <prefix>.jsonl/.csv/.table1.csv.")
@click.option("--frontier", type=str, default=None,
              help="Prospective mode: ISO date the windows must end at.")
@click.option("--top", default=5, show_default=True,
              help="Rows of the ranked table printed to stdout.")
def cmd_screen(events_path, config_path, schema_path, centroids_path,
               out_prefix, frontier, top):
    """Massive screening over a built cube; ranked anomaly exports."""
    config_text = Path(config_path).read_text()
    config = ScreeningConfig.from_json(config_text)
    records, errors, schema = _load_events(events_path, schema_path)
    cube = build_cube(records, schema)
    regions = []
    if config.location_attribute:
        centroids = (CentroidTable.from_csv(Path(centroids_path).read_text())
                     if centroids_path else default_centroids())
        locations = [l for l in schema[config.location_attribute].domain
                     if l in centroids.entries]
        regions = enumerate_region_sets(centroids, config.k_max,
                                        config.d_max, locations=locations)
    try:
        if frontier or config.prospective:
            day = (dt.date.fromisoformat(frontier) if frontier else cube.end)
            outcome = prospective_screen(cube, config, regions, day)
        else:
            outcome = massive_screen(cube, config, regions)
    except EmptyScreen as e:
        raise click.ClickException(str(e))

    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    outputs = []
    for suffix, text in ((".jsonl", reports_to_jsonl(outcome.reports)),
                         (".csv", reports_to_csv(outcome.reports)),
                         (".table1.csv",
                          reports_to_table1_csv(outcome.reports))):
        p = prefix.with_suffix(prefix.suffix + suffix)
        p.write_text(text)
        outputs.append(p)
    _write_manifest(prefix.parent, "screen",
                    [events_path, config_path], config_text, outputs)

    click.echo(f"scored {outcome.n_queries} queries, "
               f"{len(outcome.reports)} flagged at alpha={config.alpha}")
    click.echo(f"{'states':34} {'end_date':10} {'p_value':>9} "
               f"{'count':>6} {'expected':>9}")
    for r in outcome.reports[:top]:
        states = ("{" + ", ".join(r.query.region.sorted_members) + "}"
                  if r.query.region else "-")
        click.echo(f"{states:34} {r.query.window.end.strftime('%m/%d/%Y')} "
                   f"{r.p_value:>9.3g} {r.observed:>6} {r.expected:>9.2f}")


@main.command("pivot")
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--row", required=True)
@click.option("--col", required=True)
@click.option("--filter", "filter_text", default="",
              help="e.g. 'gender=female;state=A|B'")
@click.option("--schema", "schema_path", type=click.Path(exists=True))
@click.option("--window", "window_text", default=None,
              help="ISO start date and length, e.g. '2008-01-01:28'.")
@click.option("--out", "out_prefix", type=click.Path(),
              help="Output prefix; writes <prefix>.csv and <prefix>.json.")
@click.option("--modes", is_flag=True, help="Print the modal column per row.")
def cmd_pivot(events_path, row, col, filter_text, schema_path, window_text,
              out_prefix, modes):
    """Row-conditioned relative-frequency pivot table."""
    records, errors, schema = _load_events(events_path, schema_path)
    cube = build_cube(records, schema)
    filt = _parse_filter(filter_text) if filter_text else None
    window = None
    if window_text:
        start, _, length = window_text.partition(":")
        window = DateWindow(dt.date.fromisoformat(start), int(length))
    table = build_pivot(cube, row, col, filter=filt, window=window)
    click.echo(table.to_text())
    if modes:
        for r, c in row_argmax(table).items():
            click.echo(f"{r}: {c}")
    if out_prefix:
        prefix = Path(out_prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        csv_p = prefix.with_suffix(prefix.suffix + ".csv")
        json_p = prefix.with_suffix(prefix.suffix + ".json")
        csv_p.write_text(table.to_csv())
        json_p.write_text(table.to_json() + "\n")
        _write_manifest(prefix.parent, "pivot", [events_path],
                        f"{row}|{col}|{filter_text}|{window_text}",
                        [csv_p, json_p])


@main.command("serve")
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--schema", "schema_path", type=click.Path(exists=True))
@click.option("--centroids", "centroids_path", type=click.Path(exists=True))
@click.option("--location-attribute", default="state", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8722, show_default=True)
def cmd_serve(events_path, schema_path, centroids_path, location_attribute,
              host, port):
    """Serve the HTTP JSON API (GET /v1/health, POST /v1/count, ...).

    EVENTS_PATH may be a CSV of events or a saved cube snapshot (.npz).
    """
    import uvicorn

    from .service import create_app
    summary = None
    if events_path.endswith(".npz"):
        cube = CountCube.load(events_path)
    else:
        records, _, schema = _load_events(events_path, schema_path)
        cube = build_cube(records, schema)
        summary = summarize(records, schema)
    centroids = (CentroidTable.from_csv(Path(centroids_path).read_text())
                 if centroids_path else default_centroids())
    app = create_app(cube, centroids=centroids, summary=summary,
                     location_attribute=(
                         location_attribute
                         if location_attribute in cube.schema else None))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as e:
        raise click.ClickException(f"cannot bind {host}:{port}: {e}")


@main.command("watch")
@click.argument("events_path", type=click.Path(exists=True))
@click.option("--append", "append_path", required=True,
              type=click.Path(exists=True),
              help="CSV of newly arrived events (same layout).")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--schema", "schema_path", type=click.Path(exists=True))
@click.option("--centroids", "centroids_path", type=click.Path(exists=True))
def cmd_watch(events_path, append_path, config_path, schema_path,
              centroids_path):
    """Replay appended events day by day, emitting prospective alerts.

    For each frontier day past the base file's last date, runs the
    prospective screen using only data up to that day and prints each new
    report as a JSON line prefixed with its frontier date.
    """
    config = ScreeningConfig.from_json(Path(config_path).read_text())
    base_records, _, schema = _load_events(events_path, schema_path)
    append_text = Path(append_path).read_text()
    new_records, errors = parse_events(append_text, schema)
    for err in errors:
        click.echo(f"append line {err.line}: {err.cause}", err=True)
    if not new_records:
        return
    base_end = max(r.date for r in base_records) if base_records else None
    records = base_records + new_records
    cube = build_cube(records, schema)
    regions = []
    if config.location_attribute:
        centroids = (CentroidTable.from_csv(Path(centroids_path).read_text())
                     if centroids_path else default_centroids())
        locations = [l for l in schema[config.location_attribute].domain
                     if l in centroids.entries]
        regions = enumerate_region_sets(centroids, config.k_max,
                                        config.d_max, locations=locations)
    frontier = (base_end or cube.start) + dt.timedelta(days=1)
    while frontier <= cube.end:
        try:
            outcome = prospective_screen(cube, config, regions, frontier)
        except EmptyScreen:
            frontier += dt.timedelta(days=1)
            continue
        for r in outcome.reports:
            click.echo(json.dumps({"frontier": frontier.isoformat(),
                                   **r.to_dict()}, sort_keys=True))
        frontier += dt.timedelta(days=1)


@main.command("synth")
@click.argument("config_path", type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
def cmd_synth(config_path, seed, out):
    """Generate a synthetic event CSV from a declarative config."""
    config = load_synthetic_config(Path(config_path).read_text())
    records = generate_synthetic(config, seed)
    Path(out).write_text(serialize_events(records, config.schema))
    click.echo(f"wrote {len(records)} records to {out}")


if __name__ == "__main__":
    main()
