"""Search engine unit behaviour: analyzer, indexing, queries, merge."""

from __future__ import annotations

import pytest

from caseview.common import stable_shard
from caseview.search import (
    MalformedQuery,
    SearchEngine,
    ShardUnavailable,
    UnknownField,
    UnknownIndex,
    analyze,
)

SCHEMA = {
    "patient_id": "keyword",
    "body": "text",
    "created_at": "date",
    "team": "keyword",
    "score": "numeric",
    "tags": "keyword",
    "flag": "bool",
}

DOCS = [
    {"key": "d1", "fields": {"patient_id": "p1", "team": "A", "score": 3, "flag": True,
                             "created_at": "2025-01-05T10:00:00",
                             "body": "Started clozapine 100mg today. No side effects.",
                             "tags": ["psych", "meds"]}},
    {"key": "d2", "fields": {"patient_id": "p2", "team": "B", "score": 5, "flag": False,
                             "created_at": "2025-02-10",
                             "body": "No evidence of clozapine use."}},
    {"key": "d3", "fields": {"patient_id": "p3", "team": "A", "score": 1,
                             "created_at": "2025-03-15",
                             "body": "Continues on olanzapine, tolerating well."}},
    {"key": "d4", "fields": {"patient_id": "p4", "team": "C", "score": 2,
                             "created_at": "2025-03-20",
                             "body": "Evidence of good engagement, no concerns."}},
]


@pytest.fixture()
def engine(tmp_path):
    eng = SearchEngine(tmp_path / "idx", shard_count=3)
    eng.create_index("notes", SCHEMA)
    eng.index_batch("notes", DOCS)
    return eng


class TestAnalyze:
    def test_example(self):
        assert analyze("Clozapine 100mg") == [("clozapine", 0), ("100mg", 1)]

    def test_empty(self):
        assert analyze("") == []

    def test_idempotent_on_normalized_text(self):
        normalized = " ".join(t for t, _ in analyze("Started Clozapine 100mg, BMI 27.4!"))
        again = " ".join(t for t, _ in analyze(normalized))
        assert normalized == again

    def test_unicode_folding(self):
        assert [t for t, _ in analyze("Crème brûlée")] == ["creme", "brulee"]


class TestIndexing:
    def test_upsert_same_key_second_wins(self, engine):
        before = engine._state("notes").doc_count()
        engine.index_batch("notes", [
            {"key": "d2", "fields": {"patient_id": "p2", "team": "B",
                                     "body": "Amended note without the drug."}}
        ])
        assert engine._state("notes").doc_count() == before
        hits = engine.search("notes", {"text": {"terms": ["clozapine"]}})
        assert hits.keys() == ["d1"]

    def test_unknown_field_reported_batch_continues(self, engine):
        stats = engine.index_batch("notes", [
            {"key": "bad", "fields": {"nope": 1}},
            {"key": "ok", "fields": {"team": "Z", "body": "fine"}},
        ])
        assert stats.indexed == 1
        assert any("unknown field" in v for v in stats.violations)
        assert engine.get("notes", "ok") is not None
        assert engine.get("notes", "bad") is None

    def test_routing_matches_stable_hash(self, engine):
        state = engine._state("notes")
        for shard in state.shards:
            for key in shard.live_id:
                assert stable_shard(key, 3) == shard.shard_id

    def test_routing_stable_across_engines(self, tmp_path):
        keys = [f"doc-{i}" for i in range(200)]
        first = [stable_shard(k, 3) for k in keys]
        second = [stable_shard(k, 3) for k in keys]
        assert first == second

    def test_per_shard_counts_sum(self, engine):
        state = engine._state("notes")
        assert sum(s.doc_count() for s in state.shards) == 4


class TestSearch:
    def test_term_query_equals_bruteforce(self, engine):
        hits = engine.search("notes", {"text": {"terms": ["clozapine"]}})
        expected = sorted(
            d["key"] for d in DOCS
            if "clozapine" in [t for t, _ in analyze(d["fields"]["body"])]
        )
        assert sorted(hits.keys()) == expected

    def test_match_all_with_filter(self, engine):
        hits = engine.search("notes", {"filters": [{"field": "team", "eq": "A"}], "size": 100})
        assert sorted(hits.keys()) == ["d1", "d3"]

    def test_empty_query_returns_all(self, engine):
        assert engine.search("notes", {"size": 100}).total == 4

    def test_phrase_respects_positions(self, engine):
        hits = engine.search("notes", {"text": {"phrases": [["no", "evidence"]]}})
        assert hits.keys() == ["d2"]  # d4 has both words, not adjacent

    def test_bool_and_multivalue_filters(self, engine):
        assert engine.search("notes", {"filters": [{"field": "flag", "eq": True}]}).keys() == ["d1"]
        assert engine.search("notes", {"filters": [{"field": "tags", "eq": "psych"}]}).keys() == ["d1"]

    def test_numeric_range(self, engine):
        hits = engine.search("notes", {"filters": [{"field": "score", "range": {"gte": 2, "lt": 5}}],
                                       "size": 10})
        assert sorted(hits.keys()) == ["d1", "d4"]

    def test_date_range_inclusive_day(self, engine):
        hits = engine.search("notes", {
            "time_range": {"field": "created_at", "from": "2025-01-05", "to": "2025-02-10"}})
        assert sorted(hits.keys()) == ["d1", "d2"]

    def test_sort_by_field(self, engine):
        hits = engine.search("notes", {"sort": [{"field": "score", "order": "desc"}], "size": 10})
        assert hits.keys() == ["d2", "d1", "d4", "d3"]

    def test_pagination_stable(self, engine):
        all_keys = engine.search("notes", {"size": 10}).keys()
        paged = []
        for offset in range(0, 4, 2):
            paged.extend(engine.search("notes", {"from": offset, "size": 2}).keys())
        assert paged == all_keys

    def test_unknown_index(self, engine):
        with pytest.raises(UnknownIndex):
            engine.search("nope", {})

    def test_malformed_query(self, engine):
        with pytest.raises(MalformedQuery):
            engine.search("notes", {"filters": [{"field": "no_such", "eq": 1}]})
        with pytest.raises(MalformedQuery):
            engine.search("notes", {"bogus_key": 1})


class TestAggregate:
    def test_group_by_equals_naive(self, engine):
        result = engine.aggregate("notes", {}, {"group_by": ["team"]})
        naive: dict = {}
        for d in DOCS:
            team = d["fields"].get("team")
            naive[team] = naive.get(team, 0) + 1
        assert {tuple(b["key"])[0]: b["count"] for b in result.buckets} == naive

    def test_zero_matches_empty_buckets(self, engine):
        result = engine.aggregate(
            "notes", {"filters": [{"field": "team", "eq": "ZZ"}]}, {"group_by": ["team"]})
        assert result.buckets == [] and result.total_matching == 0

    def test_date_histogram_month(self, engine):
        result = engine.aggregate(
            "notes", {}, {"date_histogram": {"field": "created_at", "interval": "month"}})
        assert [(b["key"][0], b["count"]) for b in result.buckets] == [
            ("2025-01", 1), ("2025-02", 1), ("2025-03", 2)]

    def test_metric_avg(self, engine):
        result = engine.aggregate(
            "notes", {}, {"group_by": ["team"], "metric": {"kind": "avg", "field": "score"}})
        by_team = {b["key"][0]: b["metric"] for b in result.buckets}
        assert by_team["A"] == 2.0 and by_team["B"] == 5.0

    def test_unknown_agg_field(self, engine):
        with pytest.raises(UnknownField):
            engine.aggregate("notes", {}, {"group_by": ["nope"]})

    def test_bucket_counts_sum_bounded(self, engine):
        result = engine.aggregate("notes", {}, {"group_by": ["team"]})
        assert sum(b["count"] for b in result.buckets) <= result.total_matching
        # team is total and single-valued here, so equality holds
        assert sum(b["count"] for b in result.buckets) == result.total_matching


class TestHighlight:
    def test_match_mid_document(self, engine):
        hits = engine.search("notes", {"text": {"terms": ["olanzapine"]}})
        assert hits.hits[0].highlights
        assert "[[olanzapine]]" in hits.hits[0].highlights[0]

    def test_filter_only_no_snippets(self, engine):
        hits = engine.search("notes", {"filters": [{"field": "team", "eq": "A"}]})
        assert all(not h.highlights for h in hits.hits)

    def test_two_matches_two_snippets_document_order(self, engine):
        engine.index_batch("notes", [
            {"key": "d9", "fields": {
                "body": "clozapine first mention here and later clozapine again at the end"}}
        ])
        hits = engine.search("notes", {"text": {"terms": ["clozapine"]},
                                       "filters": [{"field": "body", "exists": True}]})
        d9 = [h for h in hits.hits if h.key == "d9"][0]
        assert len(d9.highlights) == 2
        assert d9.highlights[0].index("[[") < 30  # first snippet is the earlier match


class TestMergeAndPersistence:
    def test_three_shards_equal_one_shard(self, tmp_path):
        three = SearchEngine(tmp_path / "three", shard_count=3)
        one = SearchEngine(tmp_path / "one", shard_count=1)
        for eng in (three, one):
            eng.create_index("notes", SCHEMA)
            eng.index_batch("notes", DOCS)
        for query in (
            {"text": {"terms": ["clozapine", "evidence"], "op": "or"}},
            {"text": {"phrases": [["no", "evidence"]]}},
            {"filters": [{"field": "score", "range": {"gte": 2}}]},
        ):
            left = three.search("notes", dict(query, size=100))
            right = one.search("notes", dict(query, size=100))
            assert [(h.key, h.score) for h in left.hits] == [(h.key, h.score) for h in right.hits]
        agg_left = three.aggregate("notes", {}, {"group_by": ["team"]})
        agg_right = one.aggregate("notes", {}, {"group_by": ["team"]})
        assert agg_left.buckets == agg_right.buckets

    def test_empty_shard_merge(self, tmp_path):
        eng = SearchEngine(tmp_path / "idx", shard_count=3)
        eng.create_index("notes", SCHEMA)
        eng.index_batch("notes", DOCS[:1])  # routes to a single shard
        assert eng.search("notes", {"size": 10}).total == 1

    def test_shard_down_fails_closed(self, engine):
        engine.set_shard_down("notes", 2)
        with pytest.raises(ShardUnavailable):
            engine.search("notes", {})
        with pytest.raises(ShardUnavailable):
            engine.aggregate("notes", {}, {"group_by": ["team"]})
        engine.set_shard_down("notes", 2, down=False)
        assert engine.search("notes", {}).total == 4

    def test_persistence_roundtrip(self, tmp_path):
        eng = SearchEngine(tmp_path / "idx", shard_count=3)
        eng.create_index("notes", SCHEMA)
        eng.index_batch("notes", DOCS)
        eng.index_batch("notes", [{"key": "d1", "fields": {"team": "Z", "body": "changed"}}])
        reloaded = SearchEngine(tmp_path / "idx", shard_count=3)
        for query in ({"text": {"terms": ["clozapine"]}}, {"size": 100},
                      {"filters": [{"field": "team", "eq": "Z"}]}):
            a = eng.search("notes", query)
            b = reloaded.search("notes", query)
            assert [(h.key, h.score) for h in a.hits] == [(h.key, h.score) for h in b.hits]


class TestMergeFunction:
    def test_merge_fails_closed_on_unavailable_shard(self):
        from caseview.search import merge_shard_results
        from caseview.search.schema import IndexSchema

        schema = IndexSchema(name="x", fields={"a": "keyword"})
        with pytest.raises(ShardUnavailable):
            merge_shard_results([[("k", 0.0, {})]], [("_key", "asc")], schema,
                                unavailable=frozenset({1}))

    def test_merge_equals_single_list_sort(self):
        from caseview.search import merge_shard_results
        from caseview.search.schema import IndexSchema

        schema = IndexSchema(name="x", fields={"a": "keyword"})
        partials = [
            [("b", 2.0, {"a": "1"}), ("d", 1.0, {"a": "2"})],
            [],
            [("a", 2.0, {"a": "3"}), ("c", 0.5, {"a": "4"})],
        ]
        merged = merge_shard_results(partials, [("_score", "desc"), ("_key", "asc")], schema)
        assert [row[0] for row in merged] == ["a", "b", "d", "c"]

    def test_bucket_partials_sum(self):
        from caseview.search import merge_bucket_partials

        merged = merge_bucket_partials([
            {("x",): {"count": 2, "values": [3.0]}},
            {("x",): {"count": 1, "values": [1.0]}, ("y",): {"count": 4, "values": []}},
        ])
        assert merged[("x",)]["count"] == 3
        assert sorted(merged[("x",)]["values"]) == [1.0, 3.0]
        assert merged[("y",)]["count"] == 4
