"""Sentence segmentation and offset-preserving tokenization."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Abbreviations whose trailing dot never ends a sentence.
ABBREVIATIONS = frozenset(
    {"e.g", "i.e", "dr", "mr", "mrs", "ms", "prof", "vs", "etc", "approx", "cf", "st"}
)

_TERMINATORS = ".?!;"
_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


@dataclass(frozen=True)
class Token:
    text: str  # lowercased
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Alphanumeric tokens with char offsets; hyphens and slashes split."""
    return [Token(m.group().lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _word_before(text: str, dot_idx: int) -> str:
    i = dot_idx
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    return text[i:dot_idx].lower().strip()


def _is_boundary(text: str, idx: int) -> bool:
    ch = text[idx]
    if ch in "?!;":
        return True
    # '.' inside a decimal number
    if 0 < idx < len(text) - 1 and text[idx - 1].isdigit() and text[idx + 1].isdigit():
        return False
    if _word_before(text, idx) in ABBREVIATIONS:
        return False
    # A dot directly followed by a lowercase letter is mid-abbreviation
    # or mid-token, never a sentence end.
    j = idx + 1
    if j < len(text) and not text[j].isspace():
        return False
    return True


def segment_sentences(text: str) -> list[tuple[int, int]]:
    """Split text into sentence spans that partition it exactly.

    Boundaries sit after terminator characters, with guards for decimal
    numbers and a small abbreviation list. Whitespace between sentences is
    attached to the preceding span.
    """
    if not text:
        return []
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINATORS and _is_boundary(text, i):
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j >= n:
                break
            spans.append((start, j))
            start = j
            i = j
        else:
            i += 1
    spans.append((start, n))
    return spans
