"""Text analysis: lowercase, unicode-fold, split on non-alphanumerics."""

from __future__ import annotations

import re
import unicodedata

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


def fold(text: str) -> str:
    """Strip diacritics and compatibility-normalize."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def analyze(text: str) -> list[tuple[str, int]]:
    """(term, position) pairs; deterministic and idempotent on its output."""
    return [(m.group().lower(), i) for i, m in enumerate(_TOKEN_RE.finditer(fold(text)))]


def analyze_with_offsets(text: str) -> list[tuple[str, int, int, int]]:
    """(term, position, start, end) over the ORIGINAL text.

    Offsets are valid for highlighting as long as folding does not change
    character counts (true for the ASCII corpora this stack generates).
    """
    folded = fold(text)
    source = text if len(folded) == len(text) else folded
    return [
        (m.group().lower(), i, m.start(), m.end())
        for i, m in enumerate(_TOKEN_RE.finditer(source))
    ]
