"""Single-file relational source store (SQLite) with a schema version header.

Writes are deterministic: a fixed pragma set, one connection, insertion in
generation order and a single commit, so identical cohorts produce
byte-identical files.
"""

from __future__ import annotations

import json
import sqlite3
from pathlib import Path
from typing import Iterable, Iterator

from ..common import canonical_json, sha256_hex
from .records import PatientRecord, SourceDocument, SourceEvent

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE patients (
    patient_id TEXT PRIMARY KEY,
    given_name TEXT NOT NULL,
    family_name TEXT NOT NULL,
    nhs_number TEXT NOT NULL UNIQUE,
    dob TEXT NOT NULL,
    gender TEXT NOT NULL,
    ethnicity TEXT NOT NULL,
    borough TEXT NOT NULL,
    gp_practice TEXT NOT NULL,
    active INTEGER NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE documents (
    doc_id TEXT PRIMARY KEY,
    patient_id TEXT NOT NULL,
    doc_type TEXT NOT NULL,
    created_at TEXT NOT NULL,
    body TEXT NOT NULL
);
CREATE TABLE events (
    event_id TEXT PRIMARY KEY,
    patient_id TEXT,
    nhs_number TEXT,
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    occurred_at TEXT NOT NULL
);
CREATE INDEX idx_documents_created ON documents (created_at);
CREATE INDEX idx_events_occurred ON events (occurred_at);
CREATE INDEX idx_events_patient ON events (patient_id);
"""


class StoreError(RuntimeError):
    pass


class SchemaMismatch(StoreError):
    pass


class SourceStore:
    """Reader/writer over the source database file."""

    def __init__(self, path: str | Path, conn: sqlite3.Connection):
        self.path = Path(path)
        self.conn = conn

    # -- lifecycle -----------------------------------------------------------

    @classmethod
    def create(cls, path: str | Path, meta: dict[str, str]) -> "SourceStore":
        path = Path(path)
        if path.exists():
            path.unlink()
        conn = sqlite3.connect(path, check_same_thread=False)
        conn.execute("PRAGMA journal_mode=DELETE")
        conn.execute("PRAGMA page_size=4096")
        conn.executescript(_SCHEMA)
        rows = [("schema_version", str(SCHEMA_VERSION))] + sorted(meta.items())
        conn.executemany("INSERT INTO meta VALUES (?, ?)", rows)
        return cls(path, conn)

    @classmethod
    def open(cls, path: str | Path) -> "SourceStore":
        path = Path(path)
        if not path.exists():
            raise StoreError(f"no source store at {path}")
        conn = sqlite3.connect(path, check_same_thread=False)
        try:
            row = conn.execute("SELECT value FROM meta WHERE key='schema_version'").fetchone()
        except sqlite3.DatabaseError as exc:
            raise SchemaMismatch(f"not a source store: {path}") from exc
        if row is None or int(row[0]) != SCHEMA_VERSION:
            raise SchemaMismatch(f"unsupported schema version {row and row[0]!r} in {path}")
        return cls(path, conn)

    def close(self) -> None:
        self.conn.close()

    def commit(self) -> None:
        self.conn.commit()

    # -- writes --------------------------------------------------------------

    def add_patients(self, patients: Iterable[PatientRecord]) -> None:
        self.conn.executemany(
            "INSERT INTO patients VALUES (?,?,?,?,?,?,?,?,?,?,?)",
            (p.to_row() for p in patients),
        )

    def add_documents(self, docs: Iterable[SourceDocument]) -> None:
        self.conn.executemany(
            "INSERT INTO documents VALUES (?,?,?,?,?)",
            ((d.doc_id, d.patient_id, d.doc_type, d.created_at, d.body) for d in docs),
        )

    def add_events(self, events: Iterable[SourceEvent]) -> None:
        self.conn.executemany(
            "INSERT INTO events VALUES (?,?,?,?,?,?)",
            (
                (e.event_id, e.patient_id, e.nhs_number, e.kind, e.payload_json(), e.occurred_at)
                for e in events
            ),
        )

    # -- reads ---------------------------------------------------------------

    def get_meta(self) -> dict[str, str]:
        return dict(self.conn.execute("SELECT key, value FROM meta"))

    def counts(self) -> dict[str, int]:
        return {
            table: self.conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()[0]
            for table in ("patients", "documents", "events")
        }

    def iter_patients(self, since: str | None = None, until: str | None = None) -> Iterator[PatientRecord]:
        sql = "SELECT * FROM patients"
        clauses, args = _window("created_at", since, until)
        for row in self.conn.execute(sql + clauses + " ORDER BY patient_id", args):
            yield PatientRecord.from_row(row)

    def iter_documents(self, since: str | None = None, until: str | None = None) -> Iterator[SourceDocument]:
        sql = "SELECT doc_id, patient_id, doc_type, created_at, body FROM documents"
        clauses, args = _window("created_at", since, until)
        for row in self.conn.execute(sql + clauses + " ORDER BY doc_id", args):
            yield SourceDocument(*row)

    def iter_events(self, since: str | None = None, until: str | None = None) -> Iterator[SourceEvent]:
        sql = "SELECT event_id, patient_id, nhs_number, kind, payload, occurred_at FROM events"
        clauses, args = _window("occurred_at", since, until)
        for row in self.conn.execute(sql + clauses + " ORDER BY event_id", args):
            yield SourceEvent(row[0], row[1], row[2], row[3], json.loads(row[4]), row[5])

    def get_patient(self, patient_id: str) -> PatientRecord | None:
        row = self.conn.execute(
            "SELECT * FROM patients WHERE patient_id=?", (patient_id,)
        ).fetchone()
        return PatientRecord.from_row(row) if row else None

    def nhs_index(self) -> dict[str, str]:
        return dict(self.conn.execute("SELECT nhs_number, patient_id FROM patients"))

    def content_hash(self) -> str:
        """Canonical hash over all rows; independent of file layout."""
        parts = []
        for table, order in (("meta", "key"), ("patients", "patient_id"),
                             ("documents", "doc_id"), ("events", "event_id")):
            for row in self.conn.execute(f"SELECT * FROM {table} ORDER BY {order}"):
                parts.append(canonical_json(list(row)))
        return sha256_hex("\n".join(parts))


def _window(column: str, since: str | None, until: str | None) -> tuple[str, list]:
    clauses, args = [], []
    if since is not None:
        clauses.append(f"{column} > ?")
        args.append(since)
    if until is not None:
        clauses.append(f"{column} <= ?")
        args.append(until)
    return (" WHERE " + " AND ".join(clauses)) if clauses else "", args
