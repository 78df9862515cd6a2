"""Document-level extraction: segmentation, matching, context, snippets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .context import ContextClassifier, ContextRule
from .lexicon import Lexicon
from .matcher import PhraseMatcher
from .measurements import match_lifestyle, parse_measurement
from .segment import segment_sentences, tokenize
from .types import Entity, FlaggedValue, MeasurementValue, Mention

SNIPPET_CONTEXT = 40


@dataclass
class ExtractionResult:
    mentions: list[Mention]
    flagged: list[FlaggedValue]


class Extractor:
    """Reusable pipeline over a fixed lexicon and rule set.

    Stateless per document; safe to call concurrently. Output is sorted by
    (doc_id, span start) and is a pure function of its inputs.
    """

    def __init__(self, lexicon: Lexicon | None = None, rules: list[ContextRule] | None = None):
        from .context import load_rules

        self.lexicon = lexicon or Lexicon.load()
        self.rules = rules if rules is not None else load_rules()
        self._drug_matcher = PhraseMatcher(self.lexicon.phrase_map())
        self._classifier = ContextClassifier(self.rules)

    def _snippet(self, text: str, start: int, end: int) -> str:
        return text[max(0, start - SNIPPET_CONTEXT): min(len(text), end + SNIPPET_CONTEXT)]

    def extract_full(self, doc_id: str, text: str) -> ExtractionResult:
        mentions: list[Mention] = []
        flagged: list[FlaggedValue] = []
        for s_start, s_end in segment_sentences(text):
            sentence = text[s_start:s_end]
            tokens = tokenize(sentence)
            found: list[tuple[int, int, Entity, str, MeasurementValue | None]] = []

            for match in self._drug_matcher.find(sentence, tokens):
                found.append((match.start, match.end, Entity.MEDICATION, match.canonical, None))
            for match in match_lifestyle(sentence, tokens):
                found.append((match.start, match.end, Entity(match.canonical), match.canonical, None))
            for raw in parse_measurement(sentence):
                if not raw.plausible:
                    flagged.append(
                        FlaggedValue(
                            doc_id=doc_id,
                            start=s_start + raw.start,
                            end=s_start + raw.end,
                            entity=raw.entity,
                            values=raw.values,
                            unit=raw.unit,
                            reason=raw.reason,
                        )
                    )
                    continue
                found.append(
                    (raw.start, raw.end, raw.entity, raw.entity.value, MeasurementValue(raw.values, raw.unit))
                )

            for start, end, entity, canonical, value in found:
                polarity, temporality, certainty = self._classifier.classify(
                    sentence, (start, end), tokens
                )
                abs_start, abs_end = s_start + start, s_start + end
                mentions.append(
                    Mention(
                        doc_id=doc_id,
                        start=abs_start,
                        end=abs_end,
                        entity=entity,
                        canonical=canonical,
                        value=value,
                        polarity=polarity,
                        temporality=temporality,
                        certainty=certainty,
                        snippet=self._snippet(text, abs_start, abs_end),
                    )
                )
        mentions.sort(key=lambda m: (m.doc_id, m.start))
        return ExtractionResult(mentions=mentions, flagged=flagged)

    def extract_document(self, doc_id: str, text: str) -> list[Mention]:
        return self.extract_full(doc_id, text).mentions


def extract_document(doc, lexicon: Lexicon, rules: list[ContextRule]) -> list[Mention]:
    """One-shot extraction for a source document (object with doc_id/body)."""
    return Extractor(lexicon, rules).extract_document(doc.doc_id, doc.body)


def write_mentions_jsonl(path: str | Path, mentions: Iterable[Mention]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for m in mentions:
            fh.write(json.dumps(m.to_record(), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_mentions_jsonl(path: str | Path) -> list[Mention]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Mention.from_record(json.loads(line)))
    return out
