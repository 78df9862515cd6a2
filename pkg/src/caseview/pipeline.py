"""End-to-end pipeline: sync -> extract -> build -> snapshot -> index."""

from __future__ import annotations

import time
from datetime import date
from pathlib import Path

from .caseload.build import build_caseload, write_caseload
from .caseload.complexity import ComplexityConfig
from .caseload.snapshots import DuplicateSnapshot, SnapshotStore
from .config import AppConfig
from .etl.staging import StagingStore
from .etl.sync import append_run_log, run_daily_sync
from .search.engine import SearchEngine
from .service.index_schemas import INDEX_SCHEMAS, caseload_row_doc, mention_doc
from .synth.store import SourceStore


def load_indices(
    config: AppConfig,
    staging: StagingStore,
    rows,
    engine: SearchEngine | None = None,
) -> dict[str, int]:
    """(Re)build the five indices from the current stores."""
    engine = engine or SearchEngine(config.index_dir, shard_count=config.shard_count)
    counts: dict[str, int] = {}
    for name, fields in INDEX_SCHEMAS.items():
        engine.create_index(name, fields, replace=True)

    source = SourceStore.open(config.source)
    docs = [
        {"key": d.doc_id, "fields": {
            "patient_id": d.patient_id, "doc_type": d.doc_type,
            "created_at": d.created_at, "body": d.body,
        }}
        for d in source.iter_documents()
    ]
    counts["documents"] = engine.index_batch("documents", docs).indexed

    row_lookup = {row.patient_id: row for row in rows}
    mention_docs = []
    for entity in staging.iter_entities(entity_class="NoteMention"):
        row = row_lookup.get(entity.patient_key)
        extra = {
            "team": row.team if row else None,
            "borough": row.borough if row else None,
            "pseudo_id": row.pseudo_id if row else None,
        }
        mention_docs.append(
            {"key": entity.entity_id,
             "fields": mention_doc(entity.payload, entity.valid_from, extra)}
        )
    counts["mentions"] = engine.index_batch("mentions", mention_docs).indexed

    caseload_docs = [
        {"key": row.patient_id, "fields": caseload_row_doc(row.to_json())} for row in rows
    ]
    counts["caseload"] = engine.index_batch("caseload", caseload_docs).indexed

    snapshot_store = SnapshotStore(config.snapshot_dir)
    snapshot_docs = []
    for day in snapshot_store.dates():
        for row_json in snapshot_store.load(day):
            fields = caseload_row_doc(row_json)
            fields["snapshot_date"] = day
            snapshot_docs.append({"key": f"{day}:{row_json['patient_id']}", "fields": fields})
    counts["snapshots"] = engine.index_batch("snapshots", snapshot_docs).indexed

    source.close()
    return counts


def run_all(config: AppConfig, as_of: date, engine: SearchEngine | None = None) -> dict:
    """Full pipeline for one as-of date. Steps are sequential; the caller
    holds any cross-process exclusivity (the API's admin mutex)."""
    t0 = time.monotonic()
    summary: dict = {"as_of": as_of.isoformat()}

    source = SourceStore.open(config.source)
    staging = StagingStore.open(config.staging)
    report = run_daily_sync(source, staging, as_of)
    append_run_log(config.etl_runs, report)
    summary["sync"] = report.to_json()

    complexity = ComplexityConfig.from_dict(config.complexity)
    rows = build_caseload(staging, as_of, config.deployment_key, complexity)
    config.model_dir.mkdir(parents=True, exist_ok=True)
    model_path = Path(config.model_dir) / f"caseload-{as_of.isoformat()}.jsonl"
    summary["caseload"] = {"rows": len(rows), "hash": write_caseload(rows, model_path)}

    snapshots = SnapshotStore(config.snapshot_dir)
    try:
        snap = snapshots.snapshot_caseload(rows, as_of)
        summary["snapshot"] = {"date": snap.snapshot_date, "hash": snap.content_hash}
    except DuplicateSnapshot:
        summary["snapshot"] = {"date": as_of.isoformat(), "skipped": "already exists"}

    summary["indexed"] = load_indices(config, staging, rows, engine=engine)
    summary["wall_time_s"] = round(time.monotonic() - t0, 3)
    source.close()
    staging.close()
    return summary
