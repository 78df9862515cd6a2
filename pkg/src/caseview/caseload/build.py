"""Build the unified caseload table from staged entities."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

from ..common import canonical_json, pseudonym, sha256_hex
from ..etl.staging import StagingEntity, StagingStore
from .complexity import ComplexityConfig, complexity_score
from .rows import CHECKLIST_MEASURES, CaseloadRow, Observation, age_band, duration_band

# measure attribution for observations
_LAB_MEASURE = {
    "HbA1c": "glucose_or_HbA1c",
    "glucose": "glucose_or_HbA1c",
    "total_cholesterol": "lipid_profile",
}
_MENTION_MEASURE = {
    "BMI": "BMI",
    "blood_pressure": "blood_pressure",
    "HbA1c": "glucose_or_HbA1c",
    "glucose": "glucose_or_HbA1c",
    "lipid_profile": "lipid_profile",
    "smoking_status": "smoking_status",
    "alcohol_use": "alcohol_use",
    "diet": "diet",
    "physical_activity": "physical_activity",
}
# row-level "last value" slots (finer grained than checklist measures)
_MENTION_SLOT = {"BMI": "bmi", "blood_pressure": "bp", "HbA1c": "hba1c",
                 "glucose": "glucose", "lipid_profile": "lipid"}
_LAB_SLOT = {"HbA1c": "hba1c", "glucose": "glucose", "total_cholesterol": "lipid"}


@dataclass
class PatientBundle:
    """All staged entities for one patient, grouped by class."""

    patient_id: str
    patient: StagingEntity | None = None
    referrals: list[StagingEntity] = field(default_factory=list)
    episodes: list[StagingEntity] = field(default_factory=list)
    contacts: list[StagingEntity] = field(default_factory=list)
    diagnoses: list[StagingEntity] = field(default_factory=list)
    orders: list[StagingEntity] = field(default_factory=list)
    labs: list[StagingEntity] = field(default_factory=list)
    mentions: list[StagingEntity] = field(default_factory=list)

    def observations(self) -> list[Observation]:
        """Dated observations of checklist measures, ordered by
        (timestamp, source id); negated/past/hypothetical mentions are kept
        but do not count toward completion."""
        out: list[Observation] = []
        for lab in self.labs:
            p = lab.payload
            measure = _LAB_MEASURE.get(p.get("test_name", ""))
            if measure is None:
                continue
            out.append(
                Observation(
                    measure=measure,
                    when=lab.valid_from,
                    values=(float(p["value"]),),
                    unit=p.get("unit"),
                    source_kind="LabResult",
                    source_id=lab.entity_id,
                    counts_for_check=True,
                )
            )
        for m in self.mentions:
            p = m.payload
            measure = _MENTION_MEASURE.get(p["entity"])
            if measure is None:
                continue
            value = p.get("value")
            counts = (
                p["polarity"] == "affirmed"
                and p["temporality"] == "present"
                and p["certainty"] == "confirmed"
            )
            out.append(
                Observation(
                    measure=measure,
                    when=m.valid_from,
                    values=tuple(float(v) for v in value["values"]) if value else None,
                    unit=value["unit"] if value else None,
                    source_kind="NoteMention",
                    source_id=m.entity_id,
                    counts_for_check=counts,
                    snippet=p.get("snippet"),
                )
            )
        out.sort(key=lambda o: (o.when, o.source_id))
        return out


def bundle_patients(staging: StagingStore) -> dict[str, PatientBundle]:
    bundles: dict[str, PatientBundle] = {}

    def get(pid: str) -> PatientBundle:
        if pid not in bundles:
            bundles[pid] = PatientBundle(patient_id=pid)
        return bundles[pid]

    slot = {
        "Referral": "referrals", "TeamEpisode": "episodes", "Contact": "contacts",
        "Diagnosis": "diagnoses", "MedicationOrder": "orders", "LabResult": "labs",
        "NoteMention": "mentions",
    }
    for entity in staging.iter_entities():
        if entity.entity_class == "Patient":
            get(entity.patient_key).patient = entity
        else:
            attr = slot.get(entity.entity_class)
            if attr is not None:
                getattr(get(entity.patient_key), attr).append(entity)
    return bundles


def _latest(entities: list[StagingEntity], as_of_ts: str) -> StagingEntity | None:
    eligible = [e for e in entities if e.valid_from <= as_of_ts]
    if not eligible:
        return None
    return max(eligible, key=lambda e: (e.valid_from, e.entity_id))


def current_medications(bundle: PatientBundle, as_of: date) -> tuple[list[str], list[str], str | None]:
    """Structured open orders plus affirmed/present/confirmed mentions.

    Returns (drug names, drug classes, last antipsychotic), sorted.
    """
    as_of_ts = f"{as_of.isoformat()}T23:59:59"
    latest_per_drug: dict[str, tuple[str, str]] = {}  # canonical -> (when, class)
    for order in bundle.orders:
        if order.valid_from > as_of_ts:
            continue
        p = order.payload
        end = p.get("end_date")
        if end is not None and end <= as_of.isoformat():
            continue
        key = p["drug_name"]
        when = p.get("start_date", order.valid_from)
        if key not in latest_per_drug or when > latest_per_drug[key][0]:
            latest_per_drug[key] = (when, p.get("drug_class", "other"))
    for m in bundle.mentions:
        p = m.payload
        if p["entity"] != "medication" or m.valid_from > as_of_ts:
            continue
        if not (p["polarity"] == "affirmed" and p["temporality"] == "present"
                and p["certainty"] == "confirmed"):
            continue
        key = p["canonical"]
        when = m.valid_from[:10]
        if key not in latest_per_drug or when > latest_per_drug[key][0]:
            cls = latest_per_drug.get(key, (None, p.get("drug_class")))[1] or p.get("drug_class")
            latest_per_drug[key] = (when, cls or "other")
    drugs = sorted(latest_per_drug)
    classes = sorted({latest_per_drug[d][1] for d in drugs if latest_per_drug[d][1]})
    antipsychotics = [d for d in drugs if latest_per_drug[d][1] == "antipsychotic"]
    last_ap = max(antipsychotics, key=lambda d: latest_per_drug[d][0]) if antipsychotics else None
    return drugs, classes, last_ap


def build_row(
    bundle: PatientBundle,
    as_of: date,
    deployment_key: str,
    config: ComplexityConfig,
    lexicon_classes: dict[str, str],
) -> CaseloadRow:
    patient = bundle.patient.payload
    as_of_ts = f"{as_of.isoformat()}T23:59:59"
    dob = date.fromisoformat(patient["dob"])
    age = int((as_of - dob).days // 365.25)

    row = CaseloadRow(
        patient_id=patient["patient_id"],
        pseudo_id=pseudonym(deployment_key, patient["patient_id"]),
        given_name=patient["given_name"],
        family_name=patient["family_name"],
        nhs_number=patient["nhs_number"],
        dob=patient["dob"],
        age=age,
        age_band=age_band(age),
        gender=patient["gender"],
        ethnicity=patient["ethnicity"],
        borough=patient["borough"],
        gp_practice=patient["gp_practice"],
        active=bool(patient["active"]),
        as_of=as_of.isoformat(),
    )

    referral = _latest(bundle.referrals, as_of_ts)
    if referral is not None:
        row.referral_date = referral.valid_from[:10]

    episode = _latest(bundle.episodes, as_of_ts)
    if episode is not None:
        p = episode.payload
        row.team = p.get("team_name")
        row.care_coordinator = p.get("care_coordinator")
        row.consultant = p.get("consultant")
        row.discharge_date = p.get("end_date")

    if row.referral_date:
        end = as_of if row.active or not row.discharge_date else date.fromisoformat(row.discharge_date)
        row.duration_of_care_days = max(0, (end - date.fromisoformat(row.referral_date)).days)
        row.duration_band_label = duration_band(row.duration_of_care_days)

    diagnosis = _latest(bundle.diagnoses, as_of_ts)
    if diagnosis is not None:
        row.primary_icd10_chapter = diagnosis.payload.get("chapter", "none")
        row.icd10_code = diagnosis.payload.get("icd10_code")

    drugs, classes, last_ap = current_medications(bundle, as_of)
    row.current_medications = drugs
    row.medication_classes = classes
    row.last_antipsychotic = last_ap

    # latest value per measurement slot (max timestamp, ties by source id)
    slot_latest: dict[str, Observation] = {}
    for obs in bundle.observations():
        if obs.when > as_of_ts or obs.values is None:
            continue
        slot = _slot_for(obs)
        if slot is None:
            continue
        cur = slot_latest.get(slot)
        if cur is None or (obs.when, obs.source_id) > (cur.when, cur.source_id):
            slot_latest[slot] = obs
    for slot, obs in sorted(slot_latest.items()):
        row.measures[slot] = {
            "values": list(obs.values),
            "unit": obs.unit,
            "date": obs.when[:10],
            "source": [obs.source_kind, obs.source_id],
        }

    window_start = as_of - timedelta(days=365)
    checklist = checklist_status(bundle, as_of)
    row.phc_status = {m: checklist[m]["status"] for m in CHECKLIST_MEASURES}
    row.phc_complete_count = sum(1 for m in CHECKLIST_MEASURES if row.phc_status[m] == "complete")

    ws = window_start.isoformat()
    for contact in bundle.contacts:
        if not (ws < contact.valid_from[:10] <= as_of.isoformat()):
            continue
        setting = contact.payload.get("setting")
        if setting == "crisis":
            row.crisis_contacts_12m += 1
        elif setting == "ae":
            row.ae_attendances_12m += 1
        else:
            row.contacts_12m += 1

    row.unassigned = row.active and not row.care_coordinator
    row.complexity_score, row.risk_zone = complexity_score(
        row.crisis_contacts_12m, row.ae_attendances_12m,
        row.primary_icd10_chapter, row.duration_band_label, config,
    )
    return row


def _slot_for(obs: Observation) -> str | None:
    if obs.measure == "BMI":
        return "bmi"
    if obs.measure == "blood_pressure":
        return "bp"
    if obs.measure == "glucose_or_HbA1c":
        return "hba1c" if obs.unit in ("mmol/mol", "%") else "glucose"
    if obs.measure == "lipid_profile":
        return "lipid"
    return None


def checklist_status(bundle: PatientBundle, as_of: date) -> dict[str, dict]:
    """Per-measure completion: a qualifying observation in the trailing
    365 days. Carries provenance for every completed measure."""
    window_start = (as_of - timedelta(days=365)).isoformat()
    as_of_ts = f"{as_of.isoformat()}T23:59:59"
    status: dict[str, dict] = {
        m: {"status": "due", "last_date": None, "source": None} for m in CHECKLIST_MEASURES
    }
    for obs in bundle.observations():
        if not obs.counts_for_check:
            continue
        obs_day = obs.when[:10]
        if not (window_start < obs_day and obs.when <= as_of_ts):
            continue
        entry = status[obs.measure]
        if entry["last_date"] is None or obs_day > entry["last_date"]:
            entry.update(
                status="complete", last_date=obs_day, source=[obs.source_kind, obs.source_id]
            )
    return status


def build_caseload(
    staging: StagingStore,
    as_of: date,
    deployment_key: str = "dev-deployment-key",
    config: ComplexityConfig | None = None,
) -> list[CaseloadRow]:
    """One row per patient ever registered, latest-value semantics."""
    config = config or ComplexityConfig()
    bundles = bundle_patients(staging)
    rows = []
    for pid in sorted(bundles):
        bundle = bundles[pid]
        if bundle.patient is None:
            continue  # unlinked orphan entities carry no demographic row
        rows.append(build_row(bundle, as_of, deployment_key, config, {}))
    return rows


def write_caseload(rows: list[CaseloadRow], path: str | Path) -> str:
    """Write rows as JSONL; returns the content hash."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(canonical_json(row.to_json()) + "\n")
    return sha256_hex(path.read_bytes())


def read_caseload(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out
