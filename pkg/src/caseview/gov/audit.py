"""Append-only audit log: length-prefixed records with a sha256 hash chain.

Every API data access appends exactly one event before the response is
released; if the append fails the request itself fails (write-ahead,
fail-closed). The chain makes after-the-fact edits detectable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..common import canonical_json, sha256_hex

ACTIONS = ("login", "query", "export")
DECISIONS = ("allowed", "denied")


class AuditUnavailable(RuntimeError):
    pass


class AuditChainBroken(RuntimeError):
    pass


@dataclass(frozen=True)
class AuditEvent:
    user: str
    role: str
    action: str  # login | query | export
    index: str  # queried index, or "-" for logins
    query_hash: str
    result_count: int
    decision: str  # allowed | denied
    reason: str = ""
    ts: str | None = None  # filled at append when None


class AuditLog:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._seq, self._prev_hash = self._replay_tail()

    def _replay_tail(self) -> tuple[int, str]:
        seq, prev = 0, ""
        if self.path.exists():
            for record in self.iter_records():
                seq = record["seq"] + 1
                prev = record["hash"]
        return seq, prev

    def append(self, event: AuditEvent) -> str:
        """Durably append one event; returns its id. Raises AuditUnavailable
        on any write failure (callers must fail the data request)."""
        record = {
            "id": f"evt-{self._seq:08d}",
            "seq": self._seq,
            "ts": event.ts or datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S"),
            "user": event.user,
            "role": event.role,
            "action": event.action,
            "index": event.index,
            "query_hash": event.query_hash,
            "result_count": event.result_count,
            "decision": event.decision,
            "reason": event.reason,
            "prev_hash": self._prev_hash,
        }
        record["hash"] = sha256_hex(self._prev_hash + canonical_json(
            {k: v for k, v in record.items() if k != "hash"}
        ))
        payload = json.dumps(record, sort_keys=True, ensure_ascii=False).encode("utf-8")
        frame = str(len(payload)).encode("ascii") + b"\n" + payload + b"\n"
        try:
            with open(self.path, "ab") as fh:
                fh.write(frame)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise AuditUnavailable(f"audit append failed: {exc}") from exc
        self._seq += 1
        self._prev_hash = record["hash"]
        return record["id"]

    def iter_records(self):
        with open(self.path, "rb") as fh:
            while True:
                header = fh.readline()
                if not header:
                    break
                length = int(header.strip())
                payload = fh.read(length)
                fh.readline()  # trailing newline
                yield json.loads(payload.decode("utf-8"))

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        return list(self.iter_records())

    def verify_chain(self) -> int:
        """Number of verified records; raises AuditChainBroken on tampering."""
        prev = ""
        count = 0
        for record in self.records():
            expected = sha256_hex(prev + canonical_json(
                {k: v for k, v in record.items() if k != "hash"}
            ))
            if record["hash"] != expected or record["prev_hash"] != prev:
                raise AuditChainBroken(f"chain broken at seq {record['seq']}")
            prev = record["hash"]
            count += 1
        return count


def audit_stats(records: list[dict], start: str, end: str, interval: str = "week") -> list[dict]:
    """Usage series: per-interval distinct users and request counts.

    Requests are query/export events; logins establish user presence but are
    not requests. Bounds are inclusive dates.
    """
    from datetime import date, timedelta

    if interval not in ("day", "week", "month"):
        raise ValueError(f"bad interval {interval!r}")
    buckets: dict[str, dict] = {}
    for record in records:
        day = record["ts"][:10]
        if not (start <= day <= end):
            continue
        d = date.fromisoformat(day)
        if interval == "day":
            key = d.isoformat()
        elif interval == "week":
            key = (d - timedelta(days=d.weekday())).isoformat()
        else:
            key = f"{d.year:04d}-{d.month:02d}"
        slot = buckets.setdefault(key, {"period": key, "users": set(), "requests": 0})
        slot["users"].add(record["user"])
        if record["action"] in ("query", "export"):
            slot["requests"] += 1
    return [
        {"period": key, "users": len(buckets[key]["users"]), "requests": buckets[key]["requests"]}
        for key in sorted(buckets)
    ]
