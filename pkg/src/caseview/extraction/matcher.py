"""Token-level phrase matching (longest match, word boundaries)."""

from __future__ import annotations

from dataclasses import dataclass

from .segment import Token, tokenize


@dataclass(frozen=True)
class PhraseMatch:
    start: int  # char offset in the matched text
    end: int
    surface: str
    canonical: str


class PhraseMatcher:
    """Matches a phrase table against token streams.

    Matching is case-insensitive and token-aligned, so word boundaries are
    respected by construction. At each position the longest phrase wins and
    scanning resumes after it (no overlapping matches).
    """

    def __init__(self, phrases: dict[str, str]):
        self._by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for phrase, canonical in phrases.items():
            parts = tuple(phrase.split())
            self._by_first.setdefault(parts[0], []).append((parts, canonical))
        for options in self._by_first.values():
            options.sort(key=lambda pc: -len(pc[0]))

    def find(self, text: str, tokens: list[Token] | None = None) -> list[PhraseMatch]:
        if tokens is None:
            tokens = tokenize(text)
        matches: list[PhraseMatch] = []
        i = 0
        while i < len(tokens):
            options = self._by_first.get(tokens[i].text)
            matched = False
            if options:
                for parts, canonical in options:  # longest first
                    j = i + len(parts)
                    if j <= len(tokens) and all(
                        tokens[i + k].text == parts[k] for k in range(len(parts))
                    ):
                        start, end = tokens[i].start, tokens[j - 1].end
                        matches.append(
                            PhraseMatch(start=start, end=end, surface=text[start:end], canonical=canonical)
                        )
                        i = j
                        matched = True
                        break
            if not matched:
                i += 1
        return matches


def match_lexicon(text: str, lexicon) -> list[PhraseMatch]:
    """Find medication mentions in a sentence; canonical names attached."""
    return PhraseMatcher(lexicon.phrase_map()).find(text)
