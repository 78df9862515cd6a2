"""Contextual attribute classification via trigger windows.

Each trigger phrase claims a direction (pre/post/bidirectional) and a token
window; for every mention the nearest in-window trigger per attribute wins.
Defaults are affirmed/present/confirmed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .segment import Token, tokenize
from .types import Certainty, Polarity, Temporality

DEFAULT_WINDOW = 6

_DIRECTION_RANK = {"pre": 0, "post": 0, "bidirectional": 1}


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class ContextRule:
    trigger: str
    direction: str  # pre | post | bidirectional
    window: int
    polarity: Polarity | None = None
    temporality: Temporality | None = None
    certainty: Certainty | None = None

    def __post_init__(self):
        if not self.trigger:
            raise RuleError("empty trigger")
        if self.window < 1:
            raise RuleError(f"window must be >= 1: {self.trigger!r}")
        if self.direction not in _DIRECTION_RANK:
            raise RuleError(f"bad direction {self.direction!r}")


def load_rules(path: str | Path | None = None) -> list[ContextRule]:
    """Load trigger rules from JSON (bundled set when path is None)."""
    if path is None:
        text = resources.files("caseview.data").joinpath("context_rules.json").read_text()
    else:
        text = Path(path).read_text()
    obj = json.loads(text)
    window = obj.get("default_window", DEFAULT_WINDOW)
    rules = []
    for spec in obj["rules"]:
        effect = spec["effect"]
        rules.append(
            ContextRule(
                trigger=spec["trigger"],
                direction=spec["direction"],
                window=spec.get("window", window),
                polarity=Polarity(effect["polarity"]) if "polarity" in effect else None,
                temporality=Temporality(effect["temporality"]) if "temporality" in effect else None,
                certainty=Certainty(effect["certainty"]) if "certainty" in effect else None,
            )
        )
    return rules


@dataclass(frozen=True)
class TriggerHit:
    rule: ContextRule
    tok_start: int  # token indices, inclusive..exclusive
    tok_end: int


class ContextClassifier:
    def __init__(self, rules: list[ContextRule]):
        self.rules = rules
        self._by_first: dict[str, list[ContextRule]] = {}
        for rule in rules:
            first = rule.trigger.split()[0]
            self._by_first.setdefault(first, []).append(rule)

    def _find_hits(self, tokens: list[Token]) -> list[TriggerHit]:
        hits: list[TriggerHit] = []
        for i, tok in enumerate(tokens):
            for rule in self._by_first.get(tok.text, ()):
                parts = rule.trigger.split()
                j = i + len(parts)
                if j <= len(tokens) and all(tokens[i + k].text == parts[k] for k in range(len(parts))):
                    hits.append(TriggerHit(rule, i, j))
        # Longest trigger wins: drop hits strictly contained in another hit.
        kept = []
        for h in hits:
            contained = any(
                (o.tok_start <= h.tok_start and h.tok_end <= o.tok_end)
                and (o.tok_end - o.tok_start) > (h.tok_end - h.tok_start)
                for o in hits
            )
            if not contained:
                kept.append(h)
        return kept

    def classify(
        self, text: str, span: tuple[int, int], tokens: list[Token] | None = None
    ) -> tuple[Polarity, Temporality, Certainty]:
        """Attributes for a mention span within one sentence."""
        if tokens is None:
            tokens = tokenize(text)
        start, end = span
        mention_toks = [i for i, t in enumerate(tokens) if t.start < end and t.end > start]
        if not mention_toks:
            return Polarity.AFFIRMED, Temporality.PRESENT, Certainty.CONFIRMED
        m_first, m_last = mention_toks[0], mention_toks[-1] + 1

        hits = self._find_hits(tokens)
        candidates: dict[str, list[tuple[tuple[int, int, int], TriggerHit]]] = {
            "polarity": [],
            "temporality": [],
            "certainty": [],
        }
        for h in hits:
            if h.tok_start < m_last and h.tok_end > m_first:
                continue  # overlaps the mention itself
            before = h.tok_end <= m_first
            distance = (m_first - h.tok_end) if before else (h.tok_start - m_last)
            if distance > h.rule.window:
                continue
            if h.rule.direction == "pre" and not before:
                continue
            if h.rule.direction == "post" and before:
                continue
            key = (distance, _DIRECTION_RANK[h.rule.direction], h.tok_start)
            if h.rule.polarity is not None:
                candidates["polarity"].append((key, h))
            if h.rule.temporality is not None:
                candidates["temporality"].append((key, h))
            if h.rule.certainty is not None:
                candidates["certainty"].append((key, h))

        def pick(attr: str):
            if not candidates[attr]:
                return None
            return min(candidates[attr], key=lambda kh: kh[0])[1].rule

        pol_rule = pick("polarity")
        temp_rule = pick("temporality")
        cert_rule = pick("certainty")
        return (
            pol_rule.polarity if pol_rule else Polarity.AFFIRMED,
            temp_rule.temporality if temp_rule else Temporality.PRESENT,
            cert_rule.certainty if cert_rule else Certainty.CONFIRMED,
        )


def classify_context(
    text: str, span: tuple[int, int], rules: list[ContextRule]
) -> tuple[Polarity, Temporality, Certainty]:
    return ContextClassifier(rules).classify(text, span)
