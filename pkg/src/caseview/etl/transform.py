"""Source row -> conceptual entity transformation with unit normalization.

Malformed rows are quarantined with a reason code, never dropped silently.
Ward stays are staged as Contact entities (setting "ward"); the conceptual
model folds inpatient stays into the service-contact catalogue.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..extraction.lexicon import Lexicon
from ..extraction.types import Mention
from .staging import QuarantineRecord, StagingEntity

# target units per measure; values arriving in other known units are converted
UNIT_TARGETS = {
    "BMI": "kg/m2",
    "HbA1c": "mmol/mol",
    "glucose": "mmol/L",
    "total_cholesterol": "mmol/L",
    "blood_pressure": "mmHg",
}

_EVENT_CLASS = {
    "referral": "Referral",
    "team_episode": "TeamEpisode",
    "ward_stay": "Contact",
    "contact": "Contact",
    "diagnosis": "Diagnosis",
    "medication_order": "MedicationOrder",
    "lab_result": "LabResult",
}


def hba1c_pct_to_mmol(pct: float) -> float:
    """NGSP percent -> IFCC mmol/mol."""
    return round((pct - 2.15) * 10.929, 1)


@dataclass
class TransformOutcome:
    entities: list[StagingEntity]
    quarantined: list[QuarantineRecord]


def patient_to_entity(patient) -> StagingEntity:
    return StagingEntity(
        entity_id=f"Patient:{patient.patient_id}",
        entity_class="Patient",
        patient_key=patient.patient_id,
        payload={
            "patient_id": patient.patient_id,
            "given_name": patient.given_name,
            "family_name": patient.family_name,
            "nhs_number": patient.nhs_number,
            "dob": patient.dob,
            "gender": patient.gender,
            "ethnicity": patient.ethnicity,
            "borough": patient.borough,
            "gp_practice": patient.gp_practice,
            "active": patient.active,
        },
        source_refs=[("patients", patient.patient_id)],
        valid_from=patient.created_at,
    )


def event_to_entity(event, lexicon: Lexicon, phrase_map: dict[str, str] | None = None) -> StagingEntity | QuarantineRecord:
    entity_class = _EVENT_CLASS.get(event.kind)
    if entity_class is None:
        return QuarantineRecord(
            row_ref=f"events:{event.event_id}",
            table_name="events",
            reason=f"unknown event kind {event.kind!r}",
            raw={"event_id": event.event_id, "kind": event.kind},
        )
    payload = dict(event.payload)
    if event.kind == "ward_stay":
        payload["setting"] = "ward"

    if event.kind == "medication_order":
        if phrase_map is None:
            phrase_map = lexicon.phrase_map()
        name = str(payload.get("drug_name", "")).lower()
        canonical = phrase_map.get(name)
        if canonical is None:
            return QuarantineRecord(
                row_ref=f"events:{event.event_id}",
                table_name="events",
                reason=f"drug not in lexicon: {payload.get('drug_name')!r}",
                raw={"event_id": event.event_id, "payload": payload},
            )
        payload["drug_name"] = canonical
        payload["drug_class"] = lexicon.drug_class(canonical)

    if event.kind == "lab_result":
        unit = payload.get("unit")
        if unit is None:
            return QuarantineRecord(
                row_ref=f"events:{event.event_id}",
                table_name="events",
                reason="missing unit",
                raw={"event_id": event.event_id, "payload": payload},
            )
        test = payload.get("test_name")
        if test == "HbA1c" and unit == "%":
            payload["raw_value"], payload["raw_unit"] = payload["value"], unit
            payload["value"] = hba1c_pct_to_mmol(float(payload["value"]))
            payload["unit"] = UNIT_TARGETS["HbA1c"]
        elif test in UNIT_TARGETS and unit != UNIT_TARGETS[test]:
            return QuarantineRecord(
                row_ref=f"events:{event.event_id}",
                table_name="events",
                reason=f"unconvertible unit {unit!r} for {test}",
                raw={"event_id": event.event_id, "payload": payload},
            )

    if event.patient_id is not None:
        patient_key = event.patient_id
        if event.nhs_number is not None:
            payload["_nhs_number"] = event.nhs_number  # cross-checked by linkage
    else:
        patient_key = f"nhs:{event.nhs_number}"
        payload["_nhs_number"] = event.nhs_number

    return StagingEntity(
        entity_id=f"{entity_class}:{event.event_id}",
        entity_class=entity_class,
        patient_key=patient_key,
        payload=payload,
        source_refs=[("events", event.event_id)],
        valid_from=event.occurred_at,
    )


def mention_to_entity(
    mention: Mention, patient_id: str, created_at: str, lexicon: Lexicon | None = None
) -> StagingEntity:
    payload = mention.to_record()
    payload["patient_id"] = patient_id
    if mention.entity.value == "medication" and lexicon is not None:
        payload["drug_class"] = lexicon.drug_class(mention.canonical)
    if mention.value is not None and mention.entity.value == "HbA1c" and mention.value.unit == "%":
        payload["raw_value"] = list(mention.value.values)
        payload["raw_unit"] = "%"
        payload["value"] = {
            "values": [hba1c_pct_to_mmol(v) for v in mention.value.values],
            "unit": UNIT_TARGETS["HbA1c"],
        }
    return StagingEntity(
        entity_id=f"NoteMention:{mention.doc_id}:{mention.start}",
        entity_class="NoteMention",
        patient_key=patient_id,
        payload=payload,
        source_refs=[("documents", mention.doc_id)],
        valid_from=created_at,
    )


def transform_to_entities(rows, lexicon: Lexicon | None = None) -> TransformOutcome:
    """Transform an iterable of source events into staging entities."""
    lexicon = lexicon or Lexicon.load()
    phrase_map = lexicon.phrase_map()
    outcome = TransformOutcome(entities=[], quarantined=[])
    for event in rows:
        result = event_to_entity(event, lexicon, phrase_map)
        if isinstance(result, QuarantineRecord):
            outcome.quarantined.append(result)
        else:
            outcome.entities.append(result)
    return outcome
