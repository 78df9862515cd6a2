"""Shared primitives: canonical JSON, hashing, shard routing, date handling."""

from __future__ import annotations

import hashlib
import hmac
import json
from datetime import date, datetime, timedelta, timezone
from typing import Any


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and compact separators so equal values
    always produce equal bytes (the basis of every content hash here)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def content_hash(rows: list[Any]) -> str:
    """Order-insensitive hash of a collection of JSON-serializable rows."""
    digests = sorted(sha256_hex(canonical_json(r)) for r in rows)
    return sha256_hex("\n".join(digests))


def stable_shard(key: str, shard_count: int) -> int:
    """Route a document key to a shard. Uses sha1, not hash(): Python's hash
    is salted per process and would break routing across restarts."""
    digest = hashlib.sha1(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % shard_count


def pseudonym(deployment_key: str, patient_id: str) -> str:
    """Stable keyed token for a patient id ("P-" + 12 hex chars)."""
    mac = hmac.new(deployment_key.encode("utf-8"), patient_id.encode("utf-8"), hashlib.sha256)
    return "P-" + mac.hexdigest()[:12]


def parse_date(value: str) -> date:
    return date.fromisoformat(value)


def parse_ts(value: str) -> datetime:
    """Parse an ISO timestamp or bare date as a UTC datetime."""
    if len(value) == 10:
        d = date.fromisoformat(value)
        return datetime(d.year, d.month, d.day, tzinfo=timezone.utc)
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def ts_str(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S")


def epoch_seconds(value: str) -> int:
    """ISO date or timestamp -> UTC epoch seconds (dates map to midnight)."""
    return int(parse_ts(value).timestamp())


def end_of_day_epoch(value: str) -> int:
    """Upper range bounds given as bare dates include the whole day."""
    if len(value) == 10:
        return int((parse_ts(value) + timedelta(days=1)).timestamp()) - 1
    return epoch_seconds(value)


def derive_seed(*parts: Any) -> int:
    """Deterministic sub-seed from arbitrary parts (for per-patient RNGs)."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
