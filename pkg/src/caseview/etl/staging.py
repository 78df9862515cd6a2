"""Staging store: conceptual entities, sync cursor, quarantine."""

from __future__ import annotations

import json
import sqlite3
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

from ..common import canonical_json, sha256_hex

STAGING_SCHEMA_VERSION = 1

ENTITY_CLASSES = (
    "Patient", "Referral", "TeamEpisode", "Contact", "Diagnosis",
    "MedicationOrder", "LabResult", "NoteMention",
)

_SCHEMA = """
CREATE TABLE meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE entities (
    entity_id TEXT PRIMARY KEY,
    entity_class TEXT NOT NULL,
    patient_key TEXT NOT NULL,
    payload TEXT NOT NULL,
    source_refs TEXT NOT NULL,
    valid_from TEXT NOT NULL
);
CREATE TABLE quarantine (
    row_ref TEXT PRIMARY KEY,
    table_name TEXT NOT NULL,
    reason TEXT NOT NULL,
    raw TEXT NOT NULL,
    run_id TEXT NOT NULL
);
CREATE TABLE cursor (table_name TEXT PRIMARY KEY, high_water TEXT NOT NULL);
CREATE TABLE runs (run_id TEXT PRIMARY KEY, as_of TEXT NOT NULL, report TEXT NOT NULL);
CREATE INDEX idx_entities_class ON entities (entity_class);
CREATE INDEX idx_entities_patient ON entities (patient_key);
"""


class StagingError(RuntimeError):
    pass


@dataclass(frozen=True)
class StagingEntity:
    entity_id: str
    entity_class: str
    patient_key: str
    payload: dict[str, Any]
    source_refs: list[tuple[str, str]]
    valid_from: str

    def payload_json(self) -> str:
        return canonical_json(self.payload)

    def refs_json(self) -> str:
        return canonical_json([list(r) for r in self.source_refs])


@dataclass(frozen=True)
class QuarantineRecord:
    row_ref: str
    table_name: str
    reason: str
    raw: dict[str, Any]


class StagingStore:
    def __init__(self, path: str | Path, conn: sqlite3.Connection):
        self.path = Path(path)
        self.conn = conn

    @classmethod
    def create(cls, path: str | Path) -> "StagingStore":
        path = Path(path)
        if path.exists():
            path.unlink()
        # the service reads staging from whichever worker thread handles a
        # request; SQLite here is compiled serialized, so sharing is safe
        conn = sqlite3.connect(path, check_same_thread=False)
        conn.execute("PRAGMA journal_mode=DELETE")
        conn.executescript(_SCHEMA)
        conn.execute("INSERT INTO meta VALUES ('schema_version', ?)", (str(STAGING_SCHEMA_VERSION),))
        conn.commit()
        return cls(path, conn)

    @classmethod
    def open(cls, path: str | Path) -> "StagingStore":
        path = Path(path)
        if not path.exists():
            return cls.create(path)
        conn = sqlite3.connect(path, check_same_thread=False)
        row = conn.execute("SELECT value FROM meta WHERE key='schema_version'").fetchone()
        if row is None or int(row[0]) != STAGING_SCHEMA_VERSION:
            raise StagingError(f"unsupported staging schema in {path}")
        return cls(path, conn)

    def close(self) -> None:
        self.conn.close()

    # -- cursor ---------------------------------------------------------------

    def last_sync_date(self) -> str | None:
        row = self.conn.execute("SELECT value FROM meta WHERE key='last_sync_date'").fetchone()
        return row[0] if row else None

    def set_last_sync_date(self, as_of: str) -> None:
        self.conn.execute(
            "INSERT INTO meta VALUES ('last_sync_date', ?) "
            "ON CONFLICT(key) DO UPDATE SET value=excluded.value",
            (as_of,),
        )

    def high_water(self, table: str) -> str:
        row = self.conn.execute(
            "SELECT high_water FROM cursor WHERE table_name=?", (table,)
        ).fetchone()
        return row[0] if row else ""

    def set_high_water(self, table: str, value: str) -> None:
        current = self.high_water(table)
        if value < current:
            raise StagingError(f"high-water regression on {table}: {value} < {current}")
        self.conn.execute(
            "INSERT INTO cursor VALUES (?, ?) "
            "ON CONFLICT(table_name) DO UPDATE SET high_water=excluded.high_water",
            (table, value),
        )

    # -- entities ---------------------------------------------------------------

    def upsert_entity(self, entity: StagingEntity) -> str:
        """Insert or replace; returns 'inserted' | 'updated' | 'unchanged'."""
        row = self.conn.execute(
            "SELECT entity_class, patient_key, payload, source_refs, valid_from "
            "FROM entities WHERE entity_id=?",
            (entity.entity_id,),
        ).fetchone()
        new_row = (
            entity.entity_class, entity.patient_key, entity.payload_json(),
            entity.refs_json(), entity.valid_from,
        )
        if row is None:
            self.conn.execute(
                "INSERT INTO entities VALUES (?,?,?,?,?,?)", (entity.entity_id, *new_row)
            )
            return "inserted"
        if tuple(row) == new_row:
            return "unchanged"
        self.conn.execute(
            "UPDATE entities SET entity_class=?, patient_key=?, payload=?, source_refs=?, "
            "valid_from=? WHERE entity_id=?",
            (*new_row, entity.entity_id),
        )
        return "updated"

    def add_quarantine(self, rec: QuarantineRecord, run_id: str) -> None:
        self.conn.execute(
            "INSERT OR REPLACE INTO quarantine VALUES (?,?,?,?,?)",
            (rec.row_ref, rec.table_name, rec.reason, canonical_json(rec.raw), run_id),
        )

    def iter_entities(
        self, entity_class: str | None = None, patient_key: str | None = None
    ) -> Iterator[StagingEntity]:
        sql = "SELECT entity_id, entity_class, patient_key, payload, source_refs, valid_from FROM entities"
        clauses, args = [], []
        if entity_class is not None:
            clauses.append("entity_class=?")
            args.append(entity_class)
        if patient_key is not None:
            clauses.append("patient_key=?")
            args.append(patient_key)
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)
        sql += " ORDER BY entity_id"
        for row in self.conn.execute(sql, args):
            yield StagingEntity(
                entity_id=row[0], entity_class=row[1], patient_key=row[2],
                payload=json.loads(row[3]),
                source_refs=[tuple(r) for r in json.loads(row[4])],
                valid_from=row[5],
            )

    def counts_by_class(self) -> dict[str, int]:
        return dict(
            self.conn.execute("SELECT entity_class, COUNT(*) FROM entities GROUP BY entity_class")
        )

    def quarantine_rows(self) -> list[QuarantineRecord]:
        return [
            QuarantineRecord(row_ref=r[0], table_name=r[1], reason=r[2], raw=json.loads(r[3]))
            for r in self.conn.execute(
                "SELECT row_ref, table_name, reason, raw FROM quarantine ORDER BY row_ref"
            )
        ]

    def delete_mentions_for_doc(self, doc_id: str) -> None:
        # range on the primary key; LIKE is case-insensitive in SQLite and
        # would scan the whole table for every document
        prefix = f"NoteMention:{doc_id}:"
        self.conn.execute(
            "DELETE FROM entities WHERE entity_id >= ? AND entity_id < ?",
            (prefix, prefix + "\x7f"),
        )

    def record_run(self, run_id: str, as_of: str, report_json: str) -> None:
        self.conn.execute("INSERT INTO runs VALUES (?,?,?)", (run_id, as_of, report_json))

    def run_count(self) -> int:
        return self.conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]

    def commit(self) -> None:
        self.conn.commit()

    def content_hash(self) -> str:
        """Hash of staged state: entities and quarantine reasons, not run ids,
        so incremental and replayed stores can be compared."""
        parts = []
        for row in self.conn.execute(
            "SELECT entity_id, entity_class, patient_key, payload, source_refs, valid_from "
            "FROM entities ORDER BY entity_id"
        ):
            parts.append(canonical_json(list(row)))
        for row in self.conn.execute(
            "SELECT row_ref, table_name, reason, raw FROM quarantine ORDER BY row_ref"
        ):
            parts.append(canonical_json(list(row)))
        return sha256_hex("\n".join(parts))
