"""Append-only store of dated caseload snapshots.

Each snapshot is a date-named JSONL file plus a sidecar hash stamp; files are
never rewritten, so history stays immutable and verifiable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from ..common import canonical_json, sha256_hex
from .rows import CaseloadRow


class DuplicateSnapshot(ValueError):
    pass


class SnapshotCorrupt(RuntimeError):
    pass


@dataclass(frozen=True)
class CaseloadSnapshot:
    snapshot_date: str
    path: Path
    content_hash: str
    row_count: int


class SnapshotStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _data_path(self, snapshot_date: str) -> Path:
        return self.directory / f"{snapshot_date}.jsonl"

    def _hash_path(self, snapshot_date: str) -> Path:
        return self.directory / f"{snapshot_date}.sha256"

    def snapshot_caseload(self, rows: list[CaseloadRow], snapshot_date: date | str) -> CaseloadSnapshot:
        day = snapshot_date.isoformat() if isinstance(snapshot_date, date) else snapshot_date
        data_path = self._data_path(day)
        if data_path.exists():
            raise DuplicateSnapshot(f"snapshot for {day} already exists")
        payload = "".join(
            canonical_json(row.to_json()) + "\n"
            for row in sorted(rows, key=lambda r: r.patient_id)
        ).encode("utf-8")
        digest = sha256_hex(payload)
        data_path.write_bytes(payload)
        self._hash_path(day).write_text(digest + "\n")
        return CaseloadSnapshot(
            snapshot_date=day, path=data_path, content_hash=digest, row_count=len(rows)
        )

    def dates(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.jsonl"))

    def load(self, snapshot_date: str, verify: bool = True) -> list[dict]:
        data_path = self._data_path(snapshot_date)
        if not data_path.exists():
            raise FileNotFoundError(f"no snapshot for {snapshot_date}")
        blob = data_path.read_bytes()
        if verify:
            expected = self._hash_path(snapshot_date).read_text().strip()
            actual = sha256_hex(blob)
            if actual != expected:
                raise SnapshotCorrupt(
                    f"snapshot {snapshot_date} hash mismatch: {actual} != {expected}"
                )
        return [json.loads(line) for line in blob.decode("utf-8").splitlines() if line]

    def verify_all(self) -> dict[str, bool]:
        out = {}
        for day in self.dates():
            try:
                self.load(day, verify=True)
                out[day] = True
            except SnapshotCorrupt:
                out[day] = False
        return out
