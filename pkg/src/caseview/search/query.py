"""Query AST: full-text clause, filters, time range, sort and pagination.

The JSON grammar (stable across versions):

    {
      "text":   {"terms": ["clozapine"], "op": "and"|"or",
                 "phrases": [["no", "evidence"]], "fields": ["body"]},
      "filters": [
          {"field": "team", "eq": "Croydon North CMHT"},
          {"field": "borough", "in": ["Croydon", "Lambeth"]},
          {"field": "age", "range": {"gte": 18, "lte": 65}},
          {"field": "last_antipsychotic", "exists": true}
      ],
      "time_range": {"field": "created_at", "from": "2024-01-01", "to": "2025-01-01"},
      "sort": [{"field": "_score", "order": "desc"}],
      "from": 0, "size": 10
    }

An aggregation spec:

    {"group_by": ["team"],
     "date_histogram": {"field": "created_at", "interval": "month"},
     "metric": {"kind": "count" | "avg" | "min" | "max", "field": "age"}}
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .schema import IndexSchema


class MalformedQuery(ValueError):
    pass


class UnknownField(ValueError):
    pass


@dataclass(frozen=True)
class TextClause:
    terms: tuple[str, ...]
    op: str  # and | or
    phrases: tuple[tuple[str, ...], ...]
    fields: tuple[str, ...] | None  # None -> all text fields


@dataclass(frozen=True)
class Filter:
    field: str
    op: str  # eq | in | range | exists
    value: object


@dataclass
class QueryAst:
    text: TextClause | None = None
    filters: list[Filter] = dc_field(default_factory=list)
    sort: list[tuple[str, str]] = dc_field(default_factory=lambda: [("_score", "desc"), ("_key", "asc")])
    offset: int = 0
    size: int = 10

    @classmethod
    def from_json(cls, obj: dict, schema: IndexSchema) -> "QueryAst":
        if not isinstance(obj, dict):
            raise MalformedQuery("query must be an object")
        unknown_keys = set(obj) - {"text", "filters", "time_range", "sort", "from", "size"}
        if unknown_keys:
            raise MalformedQuery(f"unknown query keys: {sorted(unknown_keys)}")
        query = cls()

        text = obj.get("text")
        if text is not None:
            terms = tuple(str(t) for t in text.get("terms", ()))
            phrases = tuple(tuple(str(w) for w in p) for p in text.get("phrases", ()))
            op = text.get("op", "and")
            if op not in ("and", "or"):
                raise MalformedQuery(f"bad text op {op!r}")
            fields = text.get("fields")
            if fields is not None:
                fields = tuple(fields)
                for f in fields:
                    if schema.fields.get(f) != "text":
                        raise MalformedQuery(f"text search on non-text field {f!r}")
            if terms or phrases:
                query.text = TextClause(terms=terms, op=op, phrases=phrases, fields=fields)

        for spec in obj.get("filters", ()):
            field_name = spec.get("field")
            if field_name not in schema.fields:
                raise MalformedQuery(f"filter on unknown field {field_name!r}")
            ops = [op for op in ("eq", "in", "range", "exists") if op in spec]
            if len(ops) != 1:
                raise MalformedQuery(f"filter needs exactly one of eq/in/range/exists: {spec}")
            op = ops[0]
            value = spec[op]
            if op == "range" and not isinstance(value, dict):
                raise MalformedQuery("range filter value must be an object")
            if op == "in" and not isinstance(value, list):
                raise MalformedQuery("in filter value must be a list")
            query.filters.append(Filter(field=field_name, op=op, value=value))

        tr = obj.get("time_range")
        if tr is not None:
            field_name = tr.get("field")
            if schema.fields.get(field_name) != "date":
                raise MalformedQuery(f"time_range on non-date field {field_name!r}")
            bounds = {}
            if tr.get("from") is not None:
                bounds["gte"] = tr["from"]
            if tr.get("to") is not None:
                bounds["lte"] = tr["to"]
            query.filters.append(Filter(field=field_name, op="range", value=bounds))

        sort = obj.get("sort")
        if sort:
            query.sort = []
            for s in sort:
                field_name, order = s.get("field"), s.get("order", "asc")
                if order not in ("asc", "desc"):
                    raise MalformedQuery(f"bad sort order {order!r}")
                if field_name not in ("_score", "_key") and field_name not in schema.fields:
                    raise MalformedQuery(f"sort on unknown field {field_name!r}")
                query.sort.append((field_name, order))
            if ("_key", "asc") not in query.sort and ("_key", "desc") not in query.sort:
                query.sort.append(("_key", "asc"))  # total order for stable pagination

        query.offset = int(obj.get("from", 0))
        query.size = int(obj.get("size", 10))
        if query.offset < 0 or query.size < 0 or query.size > 10000:
            raise MalformedQuery("bad pagination bounds")
        return query


@dataclass(frozen=True)
class AggSpec:
    group_by: tuple[str, ...]
    histogram_field: str | None
    interval: str | None  # day | week | month
    metric_kind: str  # count | avg | min | max
    metric_field: str | None

    @classmethod
    def from_json(cls, obj: dict, schema: IndexSchema) -> "AggSpec":
        group_by = tuple(obj.get("group_by", ()))
        for f in group_by:
            if f not in schema.fields:
                raise UnknownField(f"group_by field {f!r} not in index")
        hist = obj.get("date_histogram")
        histogram_field = interval = None
        if hist is not None:
            histogram_field = hist.get("field")
            interval = hist.get("interval", "month")
            if schema.fields.get(histogram_field) != "date":
                raise UnknownField(f"date_histogram on non-date field {histogram_field!r}")
            if interval not in ("day", "week", "month"):
                raise MalformedQuery(f"bad interval {interval!r}")
        metric = obj.get("metric", {"kind": "count"})
        kind = metric.get("kind", "count")
        if kind not in ("count", "avg", "min", "max"):
            raise MalformedQuery(f"bad metric kind {kind!r}")
        metric_field = metric.get("field")
        if kind != "count":
            if metric_field is None or schema.fields.get(metric_field) not in ("numeric", "date"):
                raise UnknownField(f"metric field {metric_field!r} must be numeric/date")
        if not group_by and histogram_field is None and kind == "count":
            # still valid: single overall bucket
            pass
        return cls(
            group_by=group_by,
            histogram_field=histogram_field,
            interval=interval,
            metric_kind=kind,
            metric_field=metric_field,
        )
