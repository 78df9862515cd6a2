"""Command-line interface.

Pipeline and store commands run the core library directly on local files;
the `client` group is a thin HTTP client for a running server.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

import click

from .config import AppConfig, write_default_config


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@click.group()
def main():
    """Caseload analytics stack."""


@main.command()
@click.option("--workspace", type=click.Path(), required=True)
def init(workspace):
    """Create a workspace config with default dev accounts."""
    path = write_default_config(workspace)
    click.echo(f"wrote {path}")


# -- synth ---------------------------------------------------------------------


@main.group()
def synth():
    """Synthetic EHR source generation."""


@synth.command("gen")
@click.option("--seed", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--out", type=click.Path(), required=True)
def synth_gen(seed, n, out):
    from .synth.generator import generate_cohort

    result = generate_cohort(seed=seed, n=n, out_path=out)
    _echo_json({
        "store": str(result.store_path),
        "patients": result.patient_count,
        "documents": result.document_count,
        "events": result.event_count,
        "labels": result.label_count,
    })


@synth.command("validate")
@click.argument("store_path", type=click.Path(exists=True))
@click.option("--tolerance-pp", type=float, default=1.5, show_default=True)
def synth_validate(store_path, tolerance_pp):
    from .synth.store import SourceStore
    from .synth.validate import validate_distributions

    store = SourceStore.open(store_path)
    report = validate_distributions(store)
    _echo_json(report.to_json())
    if not report.within(tolerance_pp):
        click.echo(f"FAIL: max deviation {report.max_deviation_pp:.2f} pp", err=True)
        sys.exit(1)
    click.echo(f"OK: max deviation {report.max_deviation_pp:.2f} pp")


# -- etl -----------------------------------------------------------------------


@main.group()
def etl():
    """Incremental synchronisation into staging."""


@etl.command("sync")
@click.option("--source", "source_path", type=click.Path(exists=True), required=True)
@click.option("--staging", "staging_path", type=click.Path(), required=True)
@click.option("--as-of", required=True)
@click.option("--runs-log", type=click.Path(), default=None)
def etl_sync(source_path, staging_path, as_of, runs_log):
    from .etl.staging import StagingStore
    from .etl.sync import CursorRegression, append_run_log, run_daily_sync
    from .synth.store import SourceStore

    source = SourceStore.open(source_path)
    staging = StagingStore.open(staging_path)
    try:
        report = run_daily_sync(source, staging, date.fromisoformat(as_of))
    except CursorRegression as exc:
        click.echo(f"cursor regression: {exc}", err=True)
        sys.exit(1)
    _echo_json(report.to_json())
    append_run_log(runs_log or (Path(staging_path).parent / "etl_runs.jsonl"), report)


@etl.command("replay")
@click.option("--source", "source_path", type=click.Path(exists=True), required=True)
@click.option("--staging", "staging_path", type=click.Path(), required=True)
@click.option("--through", required=True)
def etl_replay(source_path, staging_path, through):
    from .etl.sync import replay
    from .synth.store import SourceStore

    source = SourceStore.open(source_path)
    staging = replay(source, staging_path, date.fromisoformat(through))
    _echo_json({"staging": str(staging.path), "content_hash": staging.content_hash()})


# -- extract ---------------------------------------------------------------------


@main.group()
def extract():
    """Clinical text extraction."""


@extract.command("run")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="Source store (.db) or JSONL of {doc_id, body} documents.")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.option("--rules", "rules_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
def extract_run(in_path, lexicon_path, rules_path, out_path):
    from .extraction.context import load_rules
    from .extraction.extract import Extractor
    from .extraction.lexicon import Lexicon

    extractor = Extractor(Lexicon.load(lexicon_path), load_rules(rules_path))
    mentions = []
    flagged = []
    if str(in_path).endswith(".db"):
        from .synth.store import SourceStore

        store = SourceStore.open(in_path)
        docs = ((d.doc_id, d.body) for d in store.iter_documents())
    else:
        def _iter_jsonl():
            with open(in_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        yield rec["doc_id"], rec["body"]
        docs = _iter_jsonl()
    for doc_id, body in docs:
        result = extractor.extract_full(doc_id, body)
        mentions.extend(result.mentions)
        flagged.extend(result.flagged)
    with open(out_path, "w", encoding="utf-8") as fh:
        for m in mentions:
            fh.write(json.dumps(m.to_record(), ensure_ascii=False) + "\n")
    flag_path = str(out_path) + ".flagged.jsonl"
    with open(flag_path, "w", encoding="utf-8") as fh:
        for f in flagged:
            fh.write(json.dumps(f.to_record(), ensure_ascii=False) + "\n")
    click.echo(f"wrote {len(mentions)} mentions to {out_path} ({len(flagged)} flagged)")


# -- model -----------------------------------------------------------------------


@main.group()
def model():
    """Caseload model build and snapshots."""


@model.command("build")
@click.option("--staging", "staging_path", type=click.Path(exists=True), required=True)
@click.option("--as-of", required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--deployment-key", default="dev-deployment-key")
def model_build(staging_path, as_of, out_dir, deployment_key):
    from .caseload.build import build_caseload, write_caseload
    from .etl.staging import StagingStore

    staging = StagingStore.open(staging_path)
    rows = build_caseload(staging, date.fromisoformat(as_of), deployment_key)
    out = Path(out_dir) / f"caseload-{as_of}.jsonl"
    digest = write_caseload(rows, out)
    _echo_json({"rows": len(rows), "path": str(out), "hash": digest})


@model.command("snapshot")
@click.option("--model-file", type=click.Path(exists=True), required=True)
@click.option("--date", "snap_date", required=True)
@click.option("--snapshot-dir", type=click.Path(), required=True)
def model_snapshot(model_file, snap_date, snapshot_dir):
    from .caseload.rows import CaseloadRow
    from .caseload.snapshots import DuplicateSnapshot, SnapshotStore

    rows = []
    with open(model_file, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                obj["duration_band_label"] = obj.pop("duration_band")
                rows.append(CaseloadRow(**obj))
    store = SnapshotStore(snapshot_dir)
    try:
        snap = store.snapshot_caseload(rows, snap_date)
    except DuplicateSnapshot as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    _echo_json({"date": snap.snapshot_date, "rows": snap.row_count, "hash": snap.content_hash})


# -- index -----------------------------------------------------------------------


@main.group()
def index():
    """Search index loading and queries."""


@index.command("load")
@click.option("--index", "index_name", required=True)
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="JSONL of {key, fields} documents.")
@click.option("--dir", "index_dir", type=click.Path(), required=True)
@click.option("--shards", type=int, default=3, show_default=True)
def index_load(index_name, in_path, index_dir, shards):
    from .search.engine import SearchEngine
    from .service.index_schemas import INDEX_SCHEMAS

    engine = SearchEngine(index_dir, shard_count=shards)
    if index_name not in engine.indices():
        if index_name not in INDEX_SCHEMAS:
            click.echo(f"unknown index {index_name!r} and no schema to create it", err=True)
            sys.exit(1)
        engine.create_index(index_name, INDEX_SCHEMAS[index_name])
    docs = []
    with open(in_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                docs.append(json.loads(line))
    stats = engine.index_batch(index_name, docs)
    _echo_json(stats.to_json())


@index.command("query")
@click.option("--index", "index_name", required=True)
@click.option("--q", "query_json", required=True, help="Query JSON (see grammar in README).")
@click.option("--agg", "agg_json", default=None)
@click.option("--dir", "index_dir", type=click.Path(exists=True), required=True)
@click.option("--shards", type=int, default=3, show_default=True)
def index_query(index_name, query_json, agg_json, index_dir, shards):
    from .search.engine import SearchEngine

    engine = SearchEngine(index_dir, shard_count=shards)
    query = json.loads(query_json)
    if agg_json:
        result = engine.aggregate(index_name, query, json.loads(agg_json))
        _echo_json(result.to_json())
    else:
        hits = engine.search(index_name, query)
        _echo_json(hits.to_json())


# -- gov -------------------------------------------------------------------------


@main.group()
def gov():
    """Governance: audit reporting and log verification."""


@gov.command("audit-report")
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--from", "start", required=True)
@click.option("--to", "end", required=True)
@click.option("--interval", default="week", show_default=True,
              type=click.Choice(["day", "week", "month"]))
def gov_audit_report(log_path, start, end, interval):
    from .gov.audit import AuditLog, audit_stats

    log = AuditLog(log_path)
    series = audit_stats(log.records(), start, end, interval)
    _echo_json({"interval": interval, "series": series})


@gov.command("verify-log")
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
def gov_verify_log(log_path):
    from .gov.audit import AuditChainBroken, AuditLog

    log = AuditLog(log_path)
    try:
        count = log.verify_chain()
    except AuditChainBroken as exc:
        click.echo(f"TAMPERED: {exc}", err=True)
        sys.exit(1)
    click.echo(f"chain intact: {count} records")


# -- dashboards --------------------------------------------------------------------


@main.group()
def dashboards():
    """Dashboard spec tooling."""


@dashboards.command("lint")
@click.option("--dir", "dash_dir", type=click.Path(exists=True), default=None,
              help="Dashboard spec directory (bundled defaults when omitted).")
def dashboards_lint(dash_dir):
    from .service.dashboards import lint_dashboards, load_dashboards

    specs = load_dashboards(dash_dir)
    problems = lint_dashboards(specs)
    for problem in problems:
        click.echo(problem, err=True)
    if problems:
        sys.exit(1)
    click.echo(f"OK: {len(specs)} dashboards lint clean")


# -- pipeline & serve ----------------------------------------------------------------


@main.group()
def pipeline():
    """End-to-end pipeline orchestration."""


@pipeline.command("run-all")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--as-of", required=True)
def pipeline_run_all(config_path, as_of):
    from .pipeline import run_all

    config = AppConfig.load(config_path)
    summary = run_all(config, date.fromisoformat(as_of))
    _echo_json(summary)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None,
              help="Static frontend build to mount at /app.")
def serve(config_path, port, host, frontend_dir):
    """Run the HTTP API."""
    import uvicorn

    from .service.app import create_app
    from .service.state import AppState

    state = AppState.from_config(AppConfig.load(config_path))
    app = create_app(state, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


# -- client (thin HTTP client) ---------------------------------------------------------


@main.group()
def client():
    """Thin client for a running server."""


def _client_request(server, method, path, token=None, **kwargs):
    import httpx

    headers = {"Authorization": f"Bearer {token}"} if token else {}
    response = httpx.request(method, server.rstrip("/") + path, headers=headers, **kwargs)
    if response.status_code >= 400:
        click.echo(f"HTTP {response.status_code}: {response.text}", err=True)
        sys.exit(1)
    return response.json()


@client.command("login")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--username", required=True)
@click.option("--password", required=True)
def client_login(server, username, password):
    data = _client_request(server, "POST", "/v1/login",
                           json={"username": username, "password": password})
    _echo_json(data)


@client.command("dashboards")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--token", required=True)
def client_dashboards(server, token):
    _echo_json(_client_request(server, "GET", "/v1/dashboards", token=token))


@client.command("panel")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--token", required=True)
@click.option("--dashboard", required=True)
@click.option("--panel", "panel_id", required=True)
@click.option("--filters", default="{}", help="JSON object of filter values.")
def client_panel(server, token, dashboard, panel_id, filters):
    _echo_json(_client_request(
        server, "POST", f"/v1/dashboards/{dashboard}/panels/{panel_id}/data",
        token=token, json={"filters": json.loads(filters)},
    ))


@client.command("chart")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--token", required=True)
@click.option("--patient", required=True)
def client_chart(server, token, patient):
    _echo_json(_client_request(server, "GET", f"/v1/patients/{patient}/chart", token=token))


@client.command("audit-stats")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--token", required=True)
@click.option("--from", "start", required=True)
@click.option("--to", "end", required=True)
@click.option("--interval", default="week", show_default=True)
def client_audit_stats(server, token, start, end, interval):
    _echo_json(_client_request(
        server, "GET", f"/v1/audit/stats?start={start}&end={end}&interval={interval}",
        token=token,
    ))


if __name__ == "__main__":
    main()
