"""Unified per-patient caseload row and its derived bands."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Any


def age_band(age: float) -> str:
    if age < 18:
        return "0-17"
    if age < 26:
        return "18-25"
    if age < 41:
        return "26-40"
    if age < 66:
        return "41-65"
    return "65+"


def duration_band(days: int) -> str:
    if days < 365:
        return "lt_1y"
    if days < 3 * 365:
        return "1_3y"
    return "gt_3y"


@dataclass
class CaseloadRow:
    # identity block
    patient_id: str
    pseudo_id: str
    given_name: str
    family_name: str
    nhs_number: str
    dob: str
    # demographics
    age: int
    age_band: str
    gender: str
    ethnicity: str
    borough: str
    gp_practice: str
    # care block
    active: bool
    team: str | None = None
    care_coordinator: str | None = None
    consultant: str | None = None
    referral_date: str | None = None
    duration_of_care_days: int = 0
    duration_band_label: str = "lt_1y"
    discharge_date: str | None = None
    # clinical block
    primary_icd10_chapter: str = "none"
    icd10_code: str | None = None
    current_medications: list[str] = field(default_factory=list)
    medication_classes: list[str] = field(default_factory=list)
    last_antipsychotic: str | None = None
    # physical-health block: measure -> {value(s), unit, date, source}
    measures: dict[str, dict[str, Any]] = field(default_factory=dict)
    phc_status: dict[str, str] = field(default_factory=dict)  # measure -> complete|due
    phc_complete_count: int = 0
    # utilisation block
    contacts_12m: int = 0
    ae_attendances_12m: int = 0
    crisis_contacts_12m: int = 0
    # derived block
    complexity_score: float = 0.0
    risk_zone: str = "green"
    unassigned: bool = False
    as_of: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "patient_id": self.patient_id,
            "pseudo_id": self.pseudo_id,
            "given_name": self.given_name,
            "family_name": self.family_name,
            "nhs_number": self.nhs_number,
            "dob": self.dob,
            "age": self.age,
            "age_band": self.age_band,
            "gender": self.gender,
            "ethnicity": self.ethnicity,
            "borough": self.borough,
            "gp_practice": self.gp_practice,
            "active": self.active,
            "team": self.team,
            "care_coordinator": self.care_coordinator,
            "consultant": self.consultant,
            "referral_date": self.referral_date,
            "duration_of_care_days": self.duration_of_care_days,
            "duration_band": self.duration_band_label,
            "discharge_date": self.discharge_date,
            "primary_icd10_chapter": self.primary_icd10_chapter,
            "icd10_code": self.icd10_code,
            "current_medications": self.current_medications,
            "medication_classes": self.medication_classes,
            "last_antipsychotic": self.last_antipsychotic,
            "measures": self.measures,
            "phc_status": self.phc_status,
            "phc_complete_count": self.phc_complete_count,
            "contacts_12m": self.contacts_12m,
            "ae_attendances_12m": self.ae_attendances_12m,
            "crisis_contacts_12m": self.crisis_contacts_12m,
            "complexity_score": self.complexity_score,
            "risk_zone": self.risk_zone,
            "unassigned": self.unassigned,
            "as_of": self.as_of,
        }


CHECKLIST_MEASURES = (
    "blood_pressure", "BMI", "glucose_or_HbA1c", "lipid_profile",
    "smoking_status", "alcohol_use", "diet", "physical_activity",
)


@dataclass(frozen=True)
class Observation:
    """One dated, provenance-bearing observation of a checklist measure."""

    measure: str
    when: str  # timestamp
    values: tuple[float, ...] | None
    unit: str | None
    source_kind: str  # LabResult | NoteMention
    source_id: str
    counts_for_check: bool  # affirmed/present/confirmed (structured: always)
    snippet: str | None = None


def month_floor(d: date) -> date:
    return d.replace(day=1)
