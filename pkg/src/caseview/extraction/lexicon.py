"""Medication lexicon: canonical names, synonyms and drug classes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

DRUG_CLASSES = ("antipsychotic", "antidepressant", "mood_stabiliser", "other")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    canonical: str
    drug_class: str
    synonyms: tuple[str, ...]


class Lexicon:
    """Phrase table mapping surface forms to canonical drug names.

    Invariants enforced at load: all phrases lowercase, synonym sets
    disjoint across canonical names.
    """

    def __init__(self, entries: dict[str, LexiconEntry]):
        self.entries = entries
        seen: dict[str, str] = {}
        for entry in entries.values():
            for syn in entry.synonyms:
                if syn != syn.lower():
                    raise LexiconError(f"synonym not lowercase: {syn!r}")
                if syn in seen:
                    raise LexiconError(
                        f"synonym {syn!r} claimed by both {seen[syn]!r} and {entry.canonical!r}"
                    )
                seen[syn] = entry.canonical

    def __len__(self) -> int:
        return len(self.entries)

    def drug_class(self, canonical: str) -> str:
        return self.entries[canonical].drug_class

    def canonicals(self, drug_class: str | None = None) -> list[str]:
        if drug_class is None:
            return sorted(self.entries)
        return sorted(c for c, e in self.entries.items() if e.drug_class == drug_class)

    def phrase_map(self) -> dict[str, str]:
        """surface phrase -> canonical name, for the matcher."""
        out: dict[str, str] = {}
        for entry in self.entries.values():
            for syn in entry.synonyms:
                out[syn] = entry.canonical
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Lexicon":
        entries = {}
        for canonical, spec in obj["entries"].items():
            if spec["class"] not in DRUG_CLASSES:
                raise LexiconError(f"unknown drug class {spec['class']!r} for {canonical!r}")
            entries[canonical] = LexiconEntry(
                canonical=canonical,
                drug_class=spec["class"],
                synonyms=tuple(spec["synonyms"]),
            )
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Lexicon":
        """Load from a JSON file, or the bundled lexicon when path is None."""
        if path is None:
            text = resources.files("caseview.data").joinpath("drug_lexicon.json").read_text()
        else:
            text = Path(path).read_text()
        return cls.from_json(json.loads(text))
