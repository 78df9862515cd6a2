"""Per-patient medication summary across structured orders and note mentions."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

from .build import PatientBundle

# tag precedence when a drug has several kinds of evidence
_TAG_RANK = {"current": 0, "past": 1, "trialled": 2, "considered_not_started": 3}


@dataclass
class MedicationItem:
    canonical: str
    drug_class: str
    tag: str
    evidence: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "canonical": self.canonical,
            "drug_class": self.drug_class,
            "tag": self.tag,
            "evidence": self.evidence,
        }


@dataclass
class MedicationSummary:
    patient_id: str
    as_of: str
    items: list[MedicationItem] = field(default_factory=list)

    def tags(self) -> dict[str, str]:
        return {item.canonical: item.tag for item in self.items}

    def to_json(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "as_of": self.as_of,
            "items": [i.to_json() for i in self.items],
        }


def _mention_tag(payload: dict) -> str | None:
    """Temporality/certainty -> summary tag; negated mentions assert nothing."""
    if payload["polarity"] == "negated":
        return None
    if payload["certainty"] == "hypothetical" or payload["temporality"] == "future":
        return "considered_not_started"
    if payload["temporality"] == "past":
        return "trialled"
    return "current"


def medication_summary(bundle: PatientBundle, as_of: date) -> MedicationSummary:
    """Union of structured orders and medication mentions, grouped by drug.

    Tags: open order -> current; ended order -> past; mention by
    temporality/certainty -> current / trialled / considered_not_started.
    The strongest tag wins (current > past > trialled > considered).
    Every item keeps its evidence with provenance snippets.
    """
    as_of_ts = f"{as_of.isoformat()}T23:59:59"
    tagged: dict[str, dict] = {}  # canonical -> {class, tag, evidence}

    def fold(canonical: str, drug_class: str, tag: str, evidence: dict) -> None:
        slot = tagged.setdefault(
            canonical, {"class": drug_class, "tag": tag, "evidence": []}
        )
        if drug_class and slot["class"] in ("", "other"):
            slot["class"] = drug_class
        if _TAG_RANK[tag] < _TAG_RANK[slot["tag"]]:
            slot["tag"] = tag
        slot["evidence"].append(evidence)

    for order in bundle.orders:
        if order.valid_from > as_of_ts:
            continue
        p = order.payload
        end = p.get("end_date")
        tag = "past" if (end is not None and end <= as_of.isoformat()) else "current"
        fold(
            p["drug_name"], p.get("drug_class", "other"), tag,
            {
                "kind": "order",
                "when": order.valid_from,
                "dose": p.get("dose"),
                "start_date": p.get("start_date"),
                "end_date": end,
                "source": order.entity_id,
            },
        )

    for m in bundle.mentions:
        p = m.payload
        if p["entity"] != "medication" or m.valid_from > as_of_ts:
            continue
        tag = _mention_tag(p)
        if tag is None:
            continue
        fold(
            p["canonical"], p.get("drug_class", ""), tag,
            {
                "kind": "mention",
                "when": m.valid_from,
                "polarity": p["polarity"],
                "temporality": p["temporality"],
                "certainty": p["certainty"],
                "snippet": p.get("snippet"),
                "source": m.entity_id,
            },
        )

    items = [
        MedicationItem(
            canonical=canonical,
            drug_class=slot["class"] or "other",
            tag=slot["tag"],
            evidence=sorted(slot["evidence"], key=lambda e: (e["when"], e["source"])),
        )
        for canonical, slot in sorted(tagged.items())
    ]
    return MedicationSummary(patient_id=bundle.patient_id, as_of=as_of.isoformat(), items=items)
