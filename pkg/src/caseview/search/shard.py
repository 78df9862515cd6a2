"""One in-process shard: doc store, inverted text index, filter columns."""

from __future__ import annotations

from dataclasses import dataclass, field

from .analyzer import analyze
from .query import Filter, TextClause
from .schema import IndexSchema, coerce_range_bound


@dataclass
class TextPostings:
    # aligned lists per term: internal doc ids and token positions
    ids: list[int] = field(default_factory=list)
    positions: list[tuple[int, ...]] = field(default_factory=list)


class Shard:
    """Holds a disjoint partition of an index's documents.

    Mutation happens only during a commit that owns the engine write lock;
    queries run against the shard via pure read methods.
    """

    def __init__(self, shard_id: int, schema: IndexSchema):
        self.shard_id = shard_id
        self.schema = schema
        self.keys: list[str] = []  # internal id -> key
        self.fields_by_id: list[dict] = []  # internal id -> normalized fields
        self.live_id: dict[str, int] = {}  # key -> current internal id
        self.text_index: dict[str, dict[str, TextPostings]] = {
            f: {} for f in schema.text_fields()
        }

    # -- writes ---------------------------------------------------------------

    def upsert(self, key: str, fields: dict) -> None:
        doc_id = len(self.keys)
        self.keys.append(key)
        self.fields_by_id.append(fields)
        self.live_id[key] = doc_id  # last write wins
        for f in self.schema.text_fields():
            value = fields.get(f)
            if not value:
                continue
            per_term: dict[str, list[int]] = {}
            for term, pos in analyze(value):
                per_term.setdefault(term, []).append(pos)
            for term, poss in per_term.items():
                postings = self.text_index[f].setdefault(term, TextPostings())
                postings.ids.append(doc_id)
                postings.positions.append(tuple(poss))

    # -- reads ----------------------------------------------------------------

    def doc_count(self) -> int:
        return len(self.live_id)

    def live_ids(self) -> list[int]:
        return sorted(self.live_id.values())

    def _has_tombstones(self) -> bool:
        return len(self.keys) != len(self.live_id)

    def _is_live(self, doc_id: int) -> bool:
        return self.live_id.get(self.keys[doc_id]) == doc_id

    def term_stats(self, term: str, fields: tuple[str, ...]) -> dict[int, int]:
        """live doc id -> total term frequency across the given text fields."""
        out: dict[int, int] = {}
        check_live = self._has_tombstones()
        for f in fields:
            postings = self.text_index.get(f, {}).get(term)
            if postings is None:
                continue
            if not check_live and not out:
                # fast path: every posting is live and this is the first field
                out = {doc_id: len(poss) for doc_id, poss in zip(postings.ids, postings.positions)}
                continue
            for doc_id, poss in zip(postings.ids, postings.positions):
                if check_live and not self._is_live(doc_id):
                    continue
                out[doc_id] = out.get(doc_id, 0) + len(poss)
        return out

    def phrase_match(self, words: tuple[str, ...], fields: tuple[str, ...]) -> set[int]:
        """live doc ids where the words appear adjacent in one field."""
        if not words:
            return set(self.live_ids())
        matched: set[int] = set()
        for f in fields:
            per_word = []
            for w in words:
                postings = self.text_index.get(f, {}).get(w)
                if postings is None:
                    per_word = None
                    break
                per_word.append(dict(zip(postings.ids, postings.positions)))
            if per_word is None:
                continue
            candidates = set(per_word[0])
            for d in per_word[1:]:
                candidates &= set(d)
            for doc_id in candidates:
                if doc_id in matched or not self._is_live(doc_id):
                    continue
                starts = set(per_word[0][doc_id])
                if any(all((p + k) in set(per_word[k][doc_id]) for k in range(1, len(words)))
                       for p in starts):
                    matched.add(doc_id)
        return matched

    def _compile_filter(self, flt: Filter):
        """Build a fields-dict predicate with all coercion done up front."""
        field_name = flt.field
        ftype = self.schema.fields[field_name]
        if flt.op == "exists":
            want_present = bool(flt.value)

            def match_exists(fields: dict) -> bool:
                return (fields.get(field_name) is not None) == want_present

            return match_exists
        if flt.op == "eq":
            want = self._coerce_eq(ftype, flt.value)

            def match_eq(fields: dict) -> bool:
                value = fields.get(field_name)
                if value is None:
                    return False
                return want in value if isinstance(value, list) else value == want

            return match_eq
        if flt.op == "in":
            wants = {self._coerce_eq(ftype, v) for v in flt.value}

            def match_in(fields: dict) -> bool:
                value = fields.get(field_name)
                if value is None:
                    return False
                if isinstance(value, list):
                    return any(v in wants for v in value)
                return value in wants

            return match_in
        if flt.op == "range":
            bounds = flt.value
            gte = coerce_range_bound(ftype, bounds.get("gte"), upper=False)
            gt = coerce_range_bound(ftype, bounds.get("gt"), upper=False)
            lte = coerce_range_bound(ftype, bounds.get("lte"), upper=True)
            lt = coerce_range_bound(ftype, bounds.get("lt"), upper=False)

            def match_range(fields: dict) -> bool:
                v = fields.get(field_name)
                if v is None:
                    return False
                if gte is not None and not v >= gte:
                    return False
                if gt is not None and not v > gt:
                    return False
                if lte is not None and not v <= lte:
                    return False
                if lt is not None and not v < lt:
                    return False
                return True

            return match_range
        raise ValueError(flt.op)

    @staticmethod
    def _coerce_eq(ftype: str, value):
        if ftype == "numeric":
            return float(value)
        if ftype == "bool":
            return "true" if value in (True, "true", 1) else "false"
        if ftype == "date":
            from ..common import epoch_seconds

            return epoch_seconds(str(value))
        return str(value)

    def match(
        self, text: TextClause | None, filters: list[Filter], text_fields: tuple[str, ...]
    ) -> tuple[list[int], dict[str, dict[int, int]], dict[str, int]]:
        """Evaluate the predicate.

        Returns (matching live doc ids, per-term tf maps, per-term doc
        frequency). df covers this whole shard so the coordinator can build
        global idf without a second postings pass.
        """
        stats: dict[str, dict[int, int]] = {}
        df: dict[str, int] = {}
        if text is not None:
            all_terms = list(dict.fromkeys(list(text.terms) + [w for p in text.phrases for w in p]))
            stats = {t: self.term_stats(t, text_fields) for t in all_terms}
            df = {t: len(stats[t]) for t in all_terms}
            if text.terms:
                sets = [set(stats[t]) for t in text.terms]
                candidates = set.union(*sets) if text.op == "or" else set.intersection(*sets)
            else:
                candidates = set(self.live_ids())
            for phrase in text.phrases:
                candidates &= self.phrase_match(phrase, text_fields)
            ids = candidates
        else:
            ids = set(self.live_ids())

        if filters:
            predicates = [self._compile_filter(f) for f in filters]
            rows = self.fields_by_id
            out = [doc_id for doc_id in ids if all(p(rows[doc_id]) for p in predicates)]
        else:
            out = list(ids)
        out.sort()
        return out, stats, df
