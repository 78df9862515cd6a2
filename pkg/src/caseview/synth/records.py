"""Source-side domain records (patients, documents, events, sidecar truth)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    given_name: str
    family_name: str
    nhs_number: str
    dob: str  # ISO date
    gender: str
    ethnicity: str
    borough: str
    gp_practice: str
    active: bool
    created_at: str  # registration timestamp

    def to_row(self) -> tuple:
        return (
            self.patient_id, self.given_name, self.family_name, self.nhs_number,
            self.dob, self.gender, self.ethnicity, self.borough, self.gp_practice,
            1 if self.active else 0, self.created_at,
        )

    @classmethod
    def from_row(cls, row) -> "PatientRecord":
        return cls(
            patient_id=row[0], given_name=row[1], family_name=row[2], nhs_number=row[3],
            dob=row[4], gender=row[5], ethnicity=row[6], borough=row[7], gp_practice=row[8],
            active=bool(row[9]), created_at=row[10],
        )


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    patient_id: str
    doc_type: str  # progress_note | correspondence | assessment
    created_at: str
    body: str


@dataclass(frozen=True)
class SourceEvent:
    event_id: str
    patient_id: str | None  # None for rows keyed only by NHS number
    nhs_number: str | None
    kind: str
    payload: dict[str, Any]
    occurred_at: str

    def payload_json(self) -> str:
        return json.dumps(self.payload, sort_keys=True, separators=(",", ":"))


EVENT_KINDS = (
    "referral", "team_episode", "ward_stay", "contact",
    "diagnosis", "medication_order", "lab_result",
)


@dataclass(frozen=True)
class LabelRecord:
    """One ground-truth fact planted in a generated document."""

    doc_id: str
    start: int
    end: int
    entity: str
    canonical: str
    value: dict | None  # {"values": [...], "unit": ...}
    polarity: str
    temporality: str
    certainty: str
    surface: str

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "start": self.start,
            "end": self.end,
            "entity": self.entity,
            "canonical": self.canonical,
            "value": self.value,
            "polarity": self.polarity,
            "temporality": self.temporality,
            "certainty": self.certainty,
            "surface": self.surface,
        }

    @classmethod
    def from_json(cls, rec: dict) -> "LabelRecord":
        return cls(**rec)
