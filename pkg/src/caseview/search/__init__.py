"""Embedded sharded inverted-index engine with aggregations."""

from .analyzer import analyze, analyze_with_offsets, fold
from .engine import (
    AggResult,
    DEFAULT_SHARD_COUNT,
    Hit,
    Hits,
    IndexStats,
    SearchEngine,
    ShardUnavailable,
    UnknownIndex,
    merge_bucket_partials,
    merge_shard_results,
)
from .query import AggSpec, Filter, MalformedQuery, QueryAst, TextClause, UnknownField
from .schema import IndexSchema, SchemaError, SchemaViolation
from .shard import Shard

__all__ = [
    "AggResult",
    "AggSpec",
    "DEFAULT_SHARD_COUNT",
    "Filter",
    "Hit",
    "Hits",
    "IndexSchema",
    "IndexStats",
    "MalformedQuery",
    "QueryAst",
    "SchemaError",
    "SchemaViolation",
    "SearchEngine",
    "Shard",
    "ShardUnavailable",
    "TextClause",
    "UnknownField",
    "UnknownIndex",
    "analyze",
    "analyze_with_offsets",
    "fold",
    "merge_bucket_partials",
    "merge_shard_results",
]
