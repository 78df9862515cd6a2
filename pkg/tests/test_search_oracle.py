"""Randomized search/aggregation oracle: engine vs naive linear scan.

The oracle reimplements matching, scoring, sorting and grouping with plain
loops and its own tokenizer, independent of the engine internals.
"""

from __future__ import annotations

import math
import random
import re
from datetime import datetime, timedelta, timezone

import pytest

from caseview.search import SearchEngine

VOCAB = (
    "clozapine olanzapine lithium review clinic home visit stable plan bloods "
    "sleep mood risk crisis depot appointment letter team nurse doctor therapy "
    "group session week month care note follow contact discharge admission"
).split()

TEAMS = ["north", "south", "east", "west"]
ZONES = ["red", "amber", "green"]

SCHEMA = {
    "body": "text",
    "extra": "text",
    "team": "keyword",
    "zone": "keyword",
    "score": "numeric",
    "when": "date",
    "tags": "keyword",
}


def build_corpus(rng: random.Random, n: int) -> list[dict]:
    docs = []
    base = datetime(2024, 1, 1, tzinfo=timezone.utc)
    for i in range(n):
        body = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(5, 30)))
        fields = {
            "body": body,
            "team": rng.choice(TEAMS),
            "zone": rng.choice(ZONES),
            "score": round(rng.uniform(0, 10), 2),
            "when": (base + timedelta(hours=rng.randint(0, 24 * 500))).strftime("%Y-%m-%dT%H:%M:%S"),
        }
        if rng.random() < 0.5:
            fields["extra"] = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(2, 8)))
        if rng.random() < 0.3:
            fields["tags"] = rng.sample(["a", "b", "c", "d"], k=rng.randint(1, 3))
        if rng.random() < 0.1:
            del fields["score"]
        docs.append({"key": f"doc-{i:05d}", "fields": fields})
    return docs


def random_query(rng: random.Random) -> tuple[dict, dict | None]:
    query: dict = {}
    if rng.random() < 0.7:
        text: dict = {}
        if rng.random() < 0.85:
            text["terms"] = rng.sample(VOCAB, k=rng.randint(1, 3))
            text["op"] = rng.choice(["and", "or"])
        if rng.random() < 0.3:
            text["phrases"] = [[rng.choice(VOCAB), rng.choice(VOCAB)]]
        if text:
            query["text"] = text
    filters = []
    if rng.random() < 0.6:
        filters.append({"field": "team", "eq": rng.choice(TEAMS)})
    if rng.random() < 0.3:
        filters.append({"field": "zone", "in": rng.sample(ZONES, k=2)})
    if rng.random() < 0.4:
        lo = round(rng.uniform(0, 5), 2)
        filters.append({"field": "score", "range": {"gte": lo, "lte": lo + rng.uniform(1, 5)}})
    if rng.random() < 0.2:
        filters.append({"field": "tags", "eq": rng.choice(["a", "b", "c", "d"])})
    if rng.random() < 0.2:
        filters.append({"field": "extra", "exists": rng.random() < 0.5})
    if filters:
        query["filters"] = filters
    if rng.random() < 0.3:
        query["time_range"] = {"field": "when", "from": "2024-04-01", "to": "2025-01-31"}
    if rng.random() < 0.25:
        query["sort"] = [{"field": "score", "order": rng.choice(["asc", "desc"])}]
    query["size"] = rng.choice([5, 10, 50, 10000])
    query["from"] = rng.choice([0, 0, 0, 3])

    agg = None
    if rng.random() < 0.5:
        agg = {}
        choice = rng.random()
        if choice < 0.4:
            agg["group_by"] = [rng.choice(["team", "zone"])]
        elif choice < 0.6:
            agg["group_by"] = ["team", "zone"]
        elif choice < 0.85:
            agg["date_histogram"] = {"field": "when", "interval": rng.choice(["day", "week", "month"])}
        else:
            agg["group_by"] = ["team"]
            agg["date_histogram"] = {"field": "when", "interval": "month"}
        if rng.random() < 0.4:
            agg["metric"] = {"kind": rng.choice(["avg", "min", "max"]), "field": "score"}
    return query, agg


# ---- independent oracle ------------------------------------------------------

def _tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


def _epoch(value: str) -> int:
    if len(value) == 10:
        value = value + "T00:00:00"
    return int(datetime.fromisoformat(value).replace(tzinfo=timezone.utc).timestamp())


def oracle_matches(docs: list[dict], query: dict) -> list[str]:
    text = query.get("text")
    out = []
    for doc in docs:
        fields = doc["fields"]
        ok = True
        if text:
            token_lists = [_tokens(fields.get(f, "")) for f in ("body", "extra")]
            flat = [t for toks in token_lists for t in toks]
            terms = text.get("terms", [])
            if terms:
                present = [t in flat for t in terms]
                ok = all(present) if text.get("op", "and") == "and" else any(present)
            for phrase in text.get("phrases", []):
                found = any(
                    toks[i: i + len(phrase)] == list(phrase)
                    for toks in token_lists
                    for i in range(len(toks) - len(phrase) + 1)
                )
                ok = ok and found
        if not ok:
            continue
        for flt in query.get("filters", []):
            value = fields.get(flt["field"])
            if "eq" in flt:
                want = flt["eq"]
                ok = want in value if isinstance(value, list) else value == want
            elif "in" in flt:
                ok = (any(v in flt["in"] for v in value) if isinstance(value, list)
                      else value in flt["in"])
            elif "range" in flt:
                if value is None:
                    ok = False
                else:
                    v = _epoch(value) if flt["field"] == "when" else value
                    bounds = flt["range"]
                    if "gte" in bounds:
                        ok = ok and v >= bounds["gte"]
                    if "lte" in bounds:
                        ok = ok and v <= bounds["lte"]
                    if "gt" in bounds:
                        ok = ok and v > bounds["gt"]
                    if "lt" in bounds:
                        ok = ok and v < bounds["lt"]
            elif "exists" in flt:
                ok = (value is not None) == flt["exists"]
            if not ok:
                break
        if ok and "time_range" in query:
            tr = query["time_range"]
            value = fields.get(tr["field"])
            if value is None:
                ok = False
            else:
                v = _epoch(value)
                ok = v >= _epoch(tr["from"]) and v <= _epoch(tr["to"]) + 86399
        if ok:
            out.append(doc["key"])
    return out


def oracle_scores(docs: list[dict], query: dict, matched: list[str]) -> dict[str, float]:
    text = query.get("text")
    if not text:
        return {k: 0.0 for k in matched}
    terms = list(dict.fromkeys(
        list(text.get("terms", [])) + [w for p in text.get("phrases", []) for w in p]
    ))
    by_key = {d["key"]: d for d in docs}
    n_docs = len(docs)
    df = {
        t: sum(
            1 for d in docs
            if t in _tokens(d["fields"].get("body", "")) + _tokens(d["fields"].get("extra", ""))
        )
        for t in terms
    }
    scores = {}
    for key in matched:
        fields = by_key[key]["fields"]
        flat = _tokens(fields.get("body", "")) + _tokens(fields.get("extra", ""))
        score = 0.0
        for t in sorted(terms):
            tf = flat.count(t)
            if tf:
                score += tf * math.log(1.0 + n_docs / (1.0 + df[t]))
        scores[key] = score
    return scores


def oracle_sorted(docs, query, matched, scores):
    by_key = {d["key"]: d for d in docs}
    sort = query.get("sort") or [{"field": "_score", "order": "desc"}]
    rows = list(matched)
    rows.sort()
    criteria = [(s["field"], s.get("order", "asc")) for s in sort]
    if ("_key", "asc") not in criteria and ("_key", "desc") not in criteria:
        criteria.append(("_key", "asc"))
    for field, order in reversed(criteria):
        reverse = order == "desc"
        if field == "_score":
            rows.sort(key=lambda k: scores[k], reverse=reverse)
        elif field == "_key":
            rows.sort(reverse=reverse)
        else:
            present = [k for k in rows if by_key[k]["fields"].get(field) is not None]
            missing = [k for k in rows if by_key[k]["fields"].get(field) is None]
            present.sort(key=lambda k: by_key[k]["fields"][field], reverse=reverse)
            rows = present + missing
    return rows


def oracle_aggregate(docs, query, agg, matched):
    by_key = {d["key"]: d for d in docs}
    buckets: dict[tuple, dict] = {}
    for key in matched:
        fields = by_key[key]["fields"]
        parts = []
        hist = agg.get("date_histogram")
        if hist:
            value = fields.get(hist["field"])
            if value is None:
                continue
            d = datetime.fromtimestamp(_epoch(value), tz=timezone.utc).date()
            if hist["interval"] == "day":
                parts.append([d.isoformat()])
            elif hist["interval"] == "week":
                parts.append([(d - timedelta(days=d.weekday())).isoformat()])
            else:
                parts.append([f"{d.year:04d}-{d.month:02d}"])
        skip = False
        for f in agg.get("group_by", []):
            value = fields.get(f)
            if value is None:
                skip = True
                break
            parts.append(sorted(set(value)) if isinstance(value, list) else [value])
        if skip:
            continue
        keys = [()]
        if not parts:
            keys = [("_all",)]
        else:
            for options in parts:
                keys = [k + (o,) for k in keys for o in options]
        metric = agg.get("metric", {"kind": "count"})
        for bucket_key in keys:
            slot = buckets.setdefault(bucket_key, {"count": 0, "values": []})
            slot["count"] += 1
            if metric["kind"] != "count":
                value = fields.get(metric["field"])
                if value is not None and not isinstance(value, (list, str)):
                    slot["values"].append(value)
    out = []
    metric = agg.get("metric", {"kind": "count"})
    for bucket_key in sorted(buckets, key=lambda k: tuple(str(p) for p in k)):
        slot = buckets[bucket_key]
        bucket = {"key": list(bucket_key), "count": slot["count"]}
        if metric["kind"] == "avg":
            bucket["metric"] = sum(sorted(slot["values"])) / len(slot["values"]) if slot["values"] else None
        elif metric["kind"] == "min":
            bucket["metric"] = min(slot["values"]) if slot["values"] else None
        elif metric["kind"] == "max":
            bucket["metric"] = max(slot["values"]) if slot["values"] else None
        out.append(bucket)
    return out


N_DOCS = 1200
N_QUERIES = 60


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(2024)
    return build_corpus(rng, N_DOCS)


@pytest.fixture(scope="module")
def engines(tmp_path_factory, corpus):
    root = tmp_path_factory.mktemp("oracle_idx")
    three = SearchEngine(root / "three", shard_count=3)
    one = SearchEngine(root / "one", shard_count=1)
    for eng in (three, one):
        eng.create_index("corpus", SCHEMA)
        eng.index_batch("corpus", corpus)
    return three, one


def run_comparison(corpus, engine, one_shard, n_queries, seed):
    rng = random.Random(seed)
    agg_checked = 0
    for i in range(n_queries):
        query, agg = random_query(rng)
        matched = oracle_matches(corpus, query)
        scores = oracle_scores(corpus, query, matched)
        expected_order = oracle_sorted(corpus, query, matched, scores)
        page = expected_order[query["from"]: query["from"] + query["size"]]

        hits = engine.search("corpus", query)
        assert hits.total == len(matched), f"query {i}: total mismatch"
        assert hits.keys() == page, f"query {i}: hit order mismatch\n{query}"
        for hit in hits.hits:
            assert abs(hit.score - scores[hit.key]) < 1e-6, f"query {i}: score mismatch"

        single = one_shard.search("corpus", query)
        assert [(h.key, h.score) for h in single.hits] == [(h.key, h.score) for h in hits.hits]

        if agg is not None:
            expected_buckets = oracle_aggregate(corpus, query, agg, matched)
            result = engine.aggregate("corpus", query, agg)
            got = [
                {"key": b["key"], "count": b["count"],
                 **({"metric": b["metric"]} if "metric" in b else {})}
                for b in result.buckets
            ]
            for got_bucket, want_bucket in zip(got, expected_buckets):
                assert got_bucket["key"] == want_bucket["key"]
                assert got_bucket["count"] == want_bucket["count"]
                if "metric" in want_bucket:
                    g, w = got_bucket.get("metric"), want_bucket.get("metric")
                    if w is None:
                        assert g is None
                    else:
                        assert abs(g - w) < 1e-9
            assert len(got) == len(expected_buckets)
            single_agg = one_shard.aggregate("corpus", query, agg)
            assert single_agg.buckets == result.buckets
            agg_checked += 1
    return agg_checked


def test_engine_matches_linear_scan_oracle(corpus, engines):
    three, one = engines
    agg_checked = run_comparison(corpus, three, one, N_QUERIES, seed=99)
    assert agg_checked >= 15
