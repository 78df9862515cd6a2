"""Longitudinal per-patient catalogues for the patient chart.

Each catalogue merges structured events with note mentions, time-ordered,
every entry carrying exactly one provenance reference; NLP-sourced entries
keep their snippet so users can check the extraction in context.
"""

from __future__ import annotations

from datetime import date

from .build import PatientBundle

CATALOGUE_KINDS = ("BMI", "medication", "contact", "diagnosis", "test_result", "psychology_episode")


def _entry(when: str, kind: str, detail: dict, source_kind: str, source_id: str,
           snippet: str | None = None) -> dict:
    entry = {
        "when": when,
        "kind": kind,
        "detail": detail,
        "provenance": {"source": source_kind, "id": source_id},
    }
    if snippet is not None:
        entry["snippet"] = snippet
    return entry


def build_catalogues(bundle: PatientBundle, as_of: date) -> dict[str, list[dict]]:
    as_of_ts = f"{as_of.isoformat()}T23:59:59"
    catalogues: dict[str, list[dict]] = {kind: [] for kind in CATALOGUE_KINDS}

    for m in bundle.mentions:
        if m.valid_from > as_of_ts:
            continue
        p = m.payload
        detail = {
            "entity": p["entity"],
            "canonical": p["canonical"],
            "value": p.get("value"),
            "polarity": p["polarity"],
            "temporality": p["temporality"],
            "certainty": p["certainty"],
        }
        if p["entity"] == "BMI":
            kind = "BMI"
        elif p["entity"] == "medication":
            kind = "medication"
        else:
            kind = "test_result"
        catalogues[kind].append(
            _entry(m.valid_from, f"mention:{p['entity']}", detail, "NoteMention",
                   m.entity_id, p.get("snippet"))
        )

    for order in bundle.orders:
        if order.valid_from > as_of_ts:
            continue
        catalogues["medication"].append(
            _entry(order.valid_from, "medication_order", dict(order.payload),
                   "MedicationOrder", order.entity_id)
        )
    for lab in bundle.labs:
        if lab.valid_from > as_of_ts:
            continue
        catalogues["test_result"].append(
            _entry(lab.valid_from, "lab_result", dict(lab.payload), "LabResult", lab.entity_id)
        )
    for contact in bundle.contacts:
        if contact.valid_from > as_of_ts:
            continue
        catalogues["contact"].append(
            _entry(contact.valid_from, "contact", dict(contact.payload), "Contact", contact.entity_id)
        )
    for dx in bundle.diagnoses:
        if dx.valid_from > as_of_ts:
            continue
        catalogues["diagnosis"].append(
            _entry(dx.valid_from, "diagnosis", dict(dx.payload), "Diagnosis", dx.entity_id)
        )

    for kind in catalogues:
        catalogues[kind].sort(key=lambda e: (e["when"], e["provenance"]["id"]))
    return catalogues
