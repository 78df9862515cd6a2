"""Rule-based clinical text extraction with contextual attributes."""

from .context import ContextClassifier, ContextRule, classify_context, load_rules
from .extract import Extractor, ExtractionResult, extract_document, read_mentions_jsonl, write_mentions_jsonl
from .lexicon import Lexicon, LexiconError
from .matcher import PhraseMatch, match_lexicon
from .measurements import PLAUSIBILITY_BOUNDS, parse_measurement
from .segment import segment_sentences, tokenize
from .types import (
    Certainty,
    Entity,
    FlaggedValue,
    LIFESTYLE_ENTITIES,
    MEASUREMENT_ENTITIES,
    MeasurementValue,
    Mention,
    Polarity,
    Temporality,
)

__all__ = [
    "Certainty",
    "ContextClassifier",
    "ContextRule",
    "Entity",
    "Extractor",
    "ExtractionResult",
    "FlaggedValue",
    "LIFESTYLE_ENTITIES",
    "Lexicon",
    "LexiconError",
    "MEASUREMENT_ENTITIES",
    "MeasurementValue",
    "Mention",
    "PhraseMatch",
    "PLAUSIBILITY_BOUNDS",
    "Polarity",
    "Temporality",
    "classify_context",
    "extract_document",
    "load_rules",
    "match_lexicon",
    "parse_measurement",
    "read_mentions_jsonl",
    "segment_sentences",
    "tokenize",
    "write_mentions_jsonl",
]
