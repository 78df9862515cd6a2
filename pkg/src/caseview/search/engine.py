"""Sharded search engine: routing, execution, merge, persistence."""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..common import stable_shard
from .analyzer import analyze, analyze_with_offsets
from .query import AggSpec, Filter, MalformedQuery, QueryAst, TextClause
from .schema import IndexSchema, SchemaViolation
from .shard import Shard

DEFAULT_SHARD_COUNT = 3
SNIPPET_CONTEXT = 40
MAX_SNIPPETS_PER_DOC = 5


class UnknownIndex(KeyError):
    pass


class ShardUnavailable(RuntimeError):
    pass


@dataclass
class IndexStats:
    index: str
    per_shard: dict[int, int]
    indexed: int
    violations: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "per_shard": {str(k): v for k, v in sorted(self.per_shard.items())},
            "indexed": self.indexed,
            "violations": self.violations,
        }


@dataclass
class IndexState:
    schema: IndexSchema
    shards: list[Shard]
    version: int
    down: frozenset[int] = frozenset()

    def doc_count(self) -> int:
        return sum(s.doc_count() for s in self.shards)


@dataclass
class Hit:
    key: str
    score: float
    doc: dict
    highlights: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"key": self.key, "score": self.score, "doc": self.doc, "highlights": self.highlights}


@dataclass
class Hits:
    total: int
    hits: list[Hit]
    offset: int
    size: int

    def keys(self) -> list[str]:
        return [h.key for h in self.hits]

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "from": self.offset,
            "size": self.size,
            "hits": [h.to_json() for h in self.hits],
        }


@dataclass
class AggResult:
    buckets: list[dict]
    total_matching: int

    def to_json(self) -> dict:
        return {"buckets": self.buckets, "total_matching": self.total_matching}


def _display_doc(schema: IndexSchema, fields: dict) -> dict:
    """Stored fields for responses: dates back to their raw strings."""
    out = {}
    for f, v in fields.items():
        if f.endswith("__raw"):
            continue
        if schema.fields.get(f) == "date":
            out[f] = fields.get(f + "__raw", v)
        else:
            out[f] = v
    return out


def _period_key(epoch: float, interval: str) -> str:
    d = datetime.fromtimestamp(int(epoch), tz=timezone.utc).date()
    if interval == "day":
        return d.isoformat()
    if interval == "week":
        return (d - timedelta(days=d.weekday())).isoformat()
    return f"{d.year:04d}-{d.month:02d}"


class SearchEngine:
    """Embedded engine over fixed in-process shards.

    Single committing writer per engine (a lock serializes index_batch);
    queries execute against an immutable state snapshot, so they never block
    on indexing and always see a committed corpus.
    """

    def __init__(self, root: str | Path, shard_count: int = DEFAULT_SHARD_COUNT):
        self.root = Path(root)
        self.shard_count = shard_count
        self._indices: dict[str, IndexState] = {}
        self._write_lock = threading.Lock()
        self.root.mkdir(parents=True, exist_ok=True)
        for manifest in sorted(self.root.glob("*/manifest.json")):
            self._load_index(manifest.parent.name)

    # -- lifecycle -------------------------------------------------------------

    def create_index(self, name: str, fields: dict[str, str], replace: bool = False) -> None:
        with self._write_lock:
            index_dir = self.root / name
            if index_dir.exists() and not replace:
                if name in self._indices:
                    return
            index_dir.mkdir(parents=True, exist_ok=True)
            if replace:
                for old in index_dir.glob("seg-*.jsonl"):
                    old.unlink()
            schema = IndexSchema(name=name, fields=fields)
            state = IndexState(
                schema=schema,
                shards=[Shard(i, schema) for i in range(self.shard_count)],
                version=0,
            )
            self._write_manifest(name, schema, version=0, segments=[[] for _ in range(self.shard_count)])
            self._indices[name] = state

    def indices(self) -> list[str]:
        return sorted(self._indices)

    def schema(self, name: str) -> IndexSchema:
        return self._state(name).schema

    def _state(self, name: str) -> IndexState:
        if name not in self._indices:
            raise UnknownIndex(name)
        return self._indices[name]

    def get(self, name: str, key: str) -> dict | None:
        """Fetch one live document by key (display form), or None."""
        state = self._state(name)
        shard = state.shards[stable_shard(key, len(state.shards))]
        doc_id = shard.live_id.get(key)
        if doc_id is None:
            return None
        return _display_doc(state.schema, shard.fields_by_id[doc_id])

    def iter_docs(self, name: str):
        """(key, display doc) for every live document, shard by shard."""
        state = self._state(name)
        for shard in state.shards:
            for key in sorted(shard.live_id):
                yield key, _display_doc(state.schema, shard.fields_by_id[shard.live_id[key]])

    def set_shard_down(self, name: str, shard_id: int, down: bool = True) -> None:
        state = self._state(name)
        downs = set(state.down)
        (downs.add if down else downs.discard)(shard_id)
        self._indices[name] = IndexState(
            schema=state.schema, shards=state.shards, version=state.version, down=frozenset(downs)
        )

    # -- persistence -----------------------------------------------------------

    def _manifest_path(self, name: str) -> Path:
        return self.root / name / "manifest.json"

    def _write_manifest(self, name: str, schema: IndexSchema, version: int, segments: list[list[str]]) -> None:
        payload = {
            "schema": schema.to_json(),
            "shard_count": self.shard_count,
            "version": version,
            "segments": segments,
        }
        tmp = self._manifest_path(name).with_suffix(".json.tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True, indent=1))
        os.replace(tmp, self._manifest_path(name))

    def _read_manifest(self, name: str) -> dict:
        return json.loads(self._manifest_path(name).read_text())

    def _load_index(self, name: str) -> None:
        manifest = self._read_manifest(name)
        schema = IndexSchema.from_json(manifest["schema"])
        shard_count = manifest["shard_count"]
        shards = [Shard(i, schema) for i in range(shard_count)]
        for shard_id, files in enumerate(manifest["segments"]):
            for seg_name in files:
                path = self.root / name / seg_name
                with open(path, encoding="utf-8") as fh:
                    for line in fh:
                        if line.strip():
                            rec = json.loads(line)
                            shards[shard_id].upsert(rec["key"], rec["fields"])
        self._indices[name] = IndexState(schema=schema, shards=shards, version=manifest["version"])

    def reload(self) -> None:
        """Drop in-memory state and reload the last committed manifests."""
        self._indices.clear()
        for manifest in sorted(self.root.glob("*/manifest.json")):
            self._load_index(manifest.parent.name)

    # -- indexing ----------------------------------------------------------------

    def index_batch(self, name: str, docs: list[dict]) -> IndexStats:
        """Validate, route and commit a batch (last write wins per key).

        Violating docs are reported and skipped; the rest of the batch goes
        through. The manifest is replaced atomically after segment files are
        written, then the in-memory state is swapped wholesale.
        """
        with self._write_lock:
            state = self._state(name)
            schema = state.schema
            manifest = self._read_manifest(name)
            version = manifest["version"] + 1
            by_shard: dict[int, list[dict]] = {}
            violations: list[str] = []
            for doc in docs:
                key = str(doc.get("key", ""))
                if not key:
                    violations.append("missing doc key")
                    continue
                try:
                    fields = schema.validate_doc(key, doc.get("fields", {}))
                except SchemaViolation as exc:
                    violations.append(str(exc))
                    continue
                shard_id = stable_shard(key, len(state.shards))
                by_shard.setdefault(shard_id, []).append({"key": key, "fields": fields})

            segments = [list(files) for files in manifest["segments"]]
            for shard_id, rows in sorted(by_shard.items()):
                seg_name = f"seg-{version:06d}-s{shard_id}.jsonl"
                with open(self.root / name / seg_name, "w", encoding="utf-8") as fh:
                    for rec in rows:
                        fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
                segments[shard_id].append(seg_name)
            self._write_manifest(name, schema, version, segments)

            new_shards = list(state.shards)
            for shard_id, rows in sorted(by_shard.items()):
                old = state.shards[shard_id]
                fresh = Shard(shard_id, schema)
                for doc_id in sorted(old.live_id.values()):
                    fresh.upsert(old.keys[doc_id], old.fields_by_id[doc_id])
                for rec in rows:
                    fresh.upsert(rec["key"], rec["fields"])
                new_shards[shard_id] = fresh
            self._indices[name] = IndexState(
                schema=schema, shards=new_shards, version=version, down=state.down
            )
            per_shard = {s.shard_id: s.doc_count() for s in new_shards}
            return IndexStats(
                index=name,
                per_shard=per_shard,
                indexed=sum(len(r) for r in by_shard.values()),
                violations=violations,
            )

    # -- query -------------------------------------------------------------------

    def _prepare(self, name: str, query: QueryAst | dict):
        state = self._state(name)
        if state.down:
            raise ShardUnavailable(
                f"index {name}: shard(s) {sorted(state.down)} unavailable; failing closed"
            )
        if isinstance(query, dict):
            query = QueryAst.from_json(query, state.schema)
        text_fields: tuple[str, ...] = ()
        normalized_text = None
        if query.text is not None:
            text_fields = query.text.fields or tuple(state.schema.text_fields())
            if not text_fields:
                raise MalformedQuery(f"index {name} has no text fields to search")
            normalized_text = TextClause(
                terms=tuple(t for raw in query.text.terms for t, _ in analyze(raw)[:1]),
                op=query.text.op,
                phrases=tuple(
                    tuple(w for raw in phrase for w, _ in analyze(raw)[:1])
                    for phrase in query.text.phrases
                ),
                fields=text_fields,
            )
        return state, query, normalized_text, text_fields

    def _matches(self, state: IndexState, text, filters: list[Filter], text_fields):
        """Per-shard evaluation plus global stats (N, df) for scoring."""
        shard_results = []
        df: dict[str, int] = {}
        for shard in state.shards:
            ids, stats, shard_df = shard.match(text, filters, text_fields)
            shard_results.append((shard, ids, stats))
            for term, count in shard_df.items():
                df[term] = df.get(term, 0) + count
        n_docs = state.doc_count()
        return shard_results, df, n_docs

    @staticmethod
    def _idf(df: int, n_docs: int) -> float:
        return math.log(1.0 + n_docs / (1.0 + df))

    def search(self, name: str, query: QueryAst | dict) -> Hits:
        """Distributed evaluation with merge identical to single-shard.

        Results equal a linear scan applying the same predicate; sorting is
        stable by (score desc, key asc) unless the query sorts otherwise.
        """
        state, query, text, text_fields = self._prepare(name, query)
        shard_results, df, n_docs = self._matches(state, text, query.filters, text_fields)

        idf = {term: self._idf(count, n_docs) for term, count in df.items()}
        partials: list[list[tuple[str, float, dict]]] = []
        for shard, ids, stats in shard_results:
            scores: dict[int, float] = {}
            if text is not None and ids:
                id_set = set(ids)
                # term-major accumulation in sorted term order keeps per-doc
                # float addition order identical to a per-doc sorted loop
                for term in sorted(stats):
                    weight = idf[term]
                    for doc_id, tf in stats[term].items():
                        if doc_id in id_set:
                            scores[doc_id] = scores.get(doc_id, 0.0) + tf * weight
            partials.append(
                [(shard.keys[doc_id], scores.get(doc_id, 0.0), shard.fields_by_id[doc_id])
                 for doc_id in ids]
            )

        merged = merge_shard_results(partials, query.sort, state.schema)
        total = len(merged)
        page = merged[query.offset: query.offset + query.size]

        hits = []
        for key, score, fields in page:
            highlights = []
            if text is not None:
                highlights = _highlight(state.schema, fields, text, text_fields)
            hits.append(
                Hit(key=key, score=round(score, 9), doc=_display_doc(state.schema, fields),
                    highlights=highlights)
            )
        return Hits(total=total, hits=hits, offset=query.offset, size=query.size)

    def aggregate(self, name: str, query: QueryAst | dict, agg: AggSpec | dict) -> AggResult:
        """Filter-then-group aggregation; buckets merged across shards with
        partial sums, equal to a single-shard group-by."""
        state, query, text, text_fields = self._prepare(name, query)
        if isinstance(agg, dict):
            agg = AggSpec.from_json(agg, state.schema)
        shard_results, _, _ = self._matches(state, text, query.filters, text_fields)

        shard_partials: list[dict[tuple, dict]] = []
        total_matching = 0
        for shard, ids, _tfs in shard_results:
            part: dict[tuple, dict] = {}
            for doc_id in ids:
                total_matching += 1
                fields = shard.fields_by_id[doc_id]
                for bucket_key in _bucket_keys(fields, agg):
                    slot = part.setdefault(bucket_key, {"count": 0, "values": []})
                    slot["count"] += 1
                    if agg.metric_kind != "count":
                        value = fields.get(agg.metric_field)
                        if value is not None and not isinstance(value, (list, str)):
                            slot["values"].append(value)
            shard_partials.append(part)
        partials = merge_bucket_partials(shard_partials)

        buckets = []
        for bucket_key in sorted(partials, key=lambda k: tuple(str(p) for p in k)):
            slot = partials[bucket_key]
            bucket = {"key": list(bucket_key), "count": slot["count"]}
            values = slot["values"]
            if agg.metric_kind == "avg":
                # summing in sorted order keeps the result independent of
                # shard partitioning (bit-identical k-shard vs 1-shard)
                bucket["metric"] = (sum(sorted(values)) / len(values)) if values else None
            elif agg.metric_kind == "min":
                bucket["metric"] = min(values) if values else None
            elif agg.metric_kind == "max":
                bucket["metric"] = max(values) if values else None
            buckets.append(bucket)
        return AggResult(buckets=buckets, total_matching=total_matching)


def merge_shard_results(
    partials: list[list[tuple[str, float, dict]]],
    sort: list[tuple[str, str]],
    schema: IndexSchema,
    unavailable: frozenset[int] = frozenset(),
) -> list[tuple[str, float, dict]]:
    """Merge per-shard hit rows into one ordering.

    Scores arrive computed against global corpus statistics, so merging is
    concatenation plus the query's sort; the result is identical to running
    the same query on a single shard holding the union. Fails closed when
    any shard is marked unavailable: no partial results.
    """
    if unavailable:
        raise ShardUnavailable(f"shard(s) {sorted(unavailable)} unavailable; failing closed")
    merged: list[tuple[str, float, dict]] = []
    for rows in partials:
        merged.extend(rows)
    # _key is always a sort criterion, so ordering is total without a
    # separate pre-sort pass
    return _sort_rows(merged, sort, schema)


def merge_bucket_partials(partials: list[dict[tuple, dict]]) -> dict[tuple, dict]:
    """Combine per-shard aggregation partials (counts and metric values)."""
    merged: dict[tuple, dict] = {}
    for part in partials:
        for bucket_key, slot in part.items():
            target = merged.setdefault(bucket_key, {"count": 0, "values": []})
            target["count"] += slot["count"]
            target["values"].extend(slot["values"])
    return merged


def _bucket_keys(fields: dict, agg: AggSpec) -> list[tuple]:
    parts: list[list] = []
    if agg.histogram_field is not None:
        epoch = fields.get(agg.histogram_field)
        if epoch is None:
            return []
        parts.append([_period_key(epoch, agg.interval)])
    for group_field in agg.group_by:
        value = fields.get(group_field)
        if value is None:
            return []
        parts.append(sorted(set(value)) if isinstance(value, list) else [value])
    if not parts:
        return [("_all",)]
    keys: list[tuple] = [()]
    for options in parts:
        keys = [k + (opt,) for k in keys for opt in options]
    return keys


def _sort_rows(rows: list[tuple[str, float, dict]], sort: list[tuple[str, str]], schema: IndexSchema):
    """Stable multi-criteria sort; missing field values always sort last."""
    for field_name, order in reversed(sort):
        reverse = order == "desc"
        if field_name == "_score":
            rows.sort(key=lambda r: r[1], reverse=reverse)
        elif field_name == "_key":
            rows.sort(key=lambda r: r[0], reverse=reverse)
        else:
            present = [r for r in rows if r[2].get(field_name) is not None]
            missing = [r for r in rows if r[2].get(field_name) is None]

            def sort_value(r):
                v = r[2][field_name]
                return tuple(v) if isinstance(v, list) else v

            present.sort(key=sort_value, reverse=reverse)
            rows[:] = present + missing
    return rows


def _highlight(schema: IndexSchema, fields: dict, text: TextClause, text_fields) -> list[str]:
    """Snippets with ±40 chars context and [[...]] around the matched span."""
    wanted_terms = set(text.terms) | {w for p in text.phrases for w in p}
    snippets: list[tuple[str, int, str]] = []
    for f in text_fields:
        value = fields.get(f)
        if not value:
            continue
        tokens = analyze_with_offsets(value)
        spans = [
            (start, end) for term, _pos, start, end in tokens if term in wanted_terms
        ]
        for phrase in text.phrases:
            k = len(phrase)
            for i in range(len(tokens) - k + 1):
                if tuple(t[0] for t in tokens[i: i + k]) == phrase:
                    spans.append((tokens[i][2], tokens[i + k - 1][3]))
        for start, end in sorted(set(spans)):
            lo = max(0, start - SNIPPET_CONTEXT)
            hi = min(len(value), end + SNIPPET_CONTEXT)
            snippet = value[lo:start] + "[[" + value[start:end] + "]]" + value[end:hi]
            snippets.append((f, start, snippet))
    snippets.sort(key=lambda s: (s[0], s[1]))
    return [s[2] for s in snippets[:MAX_SNIPPETS_PER_DOC]]
