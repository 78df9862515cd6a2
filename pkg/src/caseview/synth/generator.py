"""Deterministic synthetic-EHR cohort generation.

Every random draw flows from (seed, purpose, patient index) sub-RNGs, so a
(seed, n) pair maps to one byte-identical store. Ground truth for planted
note facts, medication statuses and linkage quirks is written to sidecar
files next to the store.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

from ..common import derive_seed
from ..extraction.lexicon import Lexicon
from . import demographics, names
from ..extraction.types import Entity
from .notes import (
    CLOSERS, DOSES, FILLERS, MEASUREMENT_ENTITY, MEASUREMENT_UNIT, MED_SWITCH, MED_TEMPLATES,
    LIFESTYLE, MEASUREMENT_PAST, MEASUREMENT_PRESENT, OPENERS,
    RenderedFact, render_sentence, sample_measurement,
)
from .records import LabelRecord, PatientRecord, SourceDocument, SourceEvent
from .store import SourceStore

GENERATION_DATE = date(2025, 6, 30)
GENERATOR_VERSION = "1"

MED_STATUSES = ("current", "past", "trialled", "considered_not_started")

# chapter -> (class, status) plant probabilities for active patients
_MED_PLAN = {
    "F2": (
        ("antipsychotic", "current", 1.0), ("antipsychotic", "past", 0.35),
        ("antipsychotic", "trialled", 0.30), ("antipsychotic", "considered_not_started", 0.20),
        ("antidepressant", "current", 0.25), ("mood_stabiliser", "current", 0.15),
    ),
    "F3": (
        ("antidepressant", "current", 0.70), ("mood_stabiliser", "current", 0.35),
        ("antidepressant", "trialled", 0.25), ("antidepressant", "considered_not_started", 0.20),
        ("antipsychotic", "current", 0.15),
    ),
    "F4": (
        ("antidepressant", "current", 0.50), ("antidepressant", "trialled", 0.15),
        ("antidepressant", "considered_not_started", 0.10),
    ),
    "F1": (("antidepressant", "current", 0.20), ("other", "current", 0.20)),
    "F6": (("antidepressant", "current", 0.30), ("mood_stabiliser", "current", 0.15)),
}
_MED_PLAN_DEFAULT = (("antidepressant", "current", 0.15), ("other", "current", 0.10))

PHYS_MEASURES = (
    "blood_pressure", "BMI", "glucose_or_HbA1c", "lipid_profile",
    "smoking_status", "alcohol_use", "diet", "physical_activity",
)
_PHYS_COMPLETION = {
    "blood_pressure": 0.70, "BMI": 0.75, "glucose_or_HbA1c": 0.65,
    "lipid_profile": 0.55, "smoking_status": 0.60, "alcohol_use": 0.60,
    "diet": 0.50, "physical_activity": 0.50,
}

_LIFESTYLE_AFFIRMED = {
    "smoking_status": ("L1", "L4"),
    "alcohol_use": ("L5", "L7"),
    "diet": ("L9", "L10"),
    "physical_activity": ("L11", "L12"),
}
_LIFESTYLE_NEGATED = {
    "smoking_status": ("L2", "L3"),
    "alcohol_use": ("L6", "L8"),
    "physical_activity": ("L13",),
}
_LIFESTYLE_BY_ID = {t.tid: t for t in LIFESTYLE}


@dataclass(frozen=True)
class MedTruth:
    canonical: str
    drug_class: str
    status: str  # current | past | trialled | considered_not_started


@dataclass
class PlannedFact:
    category: str  # med_current/... | measurement | measurement_past | lifestyle
    canonical: str | None = None  # drug canonical for med facts
    meas_kind: str | None = None  # bmi/bp/hba1c/... for measurements
    lifestyle_tid: str | None = None
    in_window: bool = False  # must land in a note within 12 months of as_of


@dataclass
class NotePlan:
    facts: list[PlannedFact] = field(default_factory=list)
    n_notes: int = 2


@dataclass
class PatientProfile:
    diagnosis_chapter: str
    med_truth: list[MedTruth] = field(default_factory=list)
    distractor_drugs: list[str] = field(default_factory=list)
    team: str = ""
    coordinator: str | None = None
    consultant: str = ""


def _rand_date(rng: random.Random, start: date, end: date) -> date:
    span = max(0, (end - start).days)
    return start + timedelta(days=rng.randint(0, span))


def _ts(d: date, rng: random.Random) -> str:
    return f"{d.isoformat()}T{rng.randint(8, 18):02d}:{rng.randint(0, 59):02d}:00"


def build_profile(
    diagnosis_chapter: str,
    active: bool,
    borough: str,
    rng: random.Random,
    lexicon: Lexicon,
) -> PatientProfile:
    """Sample team assignment and the planted medication truth."""
    if borough in names.BOROUGH_TEAMS and rng.random() < 0.8:
        team = rng.choice(names.BOROUGH_TEAMS[borough])
    else:
        team = rng.choice(names.SPECIALIST_TEAMS)
    unassigned = active and rng.random() < 0.03
    coordinator = None if unassigned else rng.choice(names.coordinators_for(team))
    consultant = rng.choice(names.consultants_for(team))

    plan = _MED_PLAN.get(diagnosis_chapter, _MED_PLAN_DEFAULT)
    used: set[str] = set()
    truth: list[MedTruth] = []
    for drug_class, status, prob in plan:
        if rng.random() >= prob:
            continue
        if not active and status == "current":
            status = "past"  # discharged patients carry no open orders
        choices = [c for c in lexicon.canonicals(drug_class) if c not in used]
        if not choices:
            continue
        canonical = rng.choice(choices)
        used.add(canonical)
        truth.append(MedTruth(canonical=canonical, drug_class=drug_class, status=status))
    distractor_pool = [c for c in lexicon.canonicals() if c not in used]
    distractors = rng.sample(distractor_pool, k=min(len(distractor_pool), rng.choice((0, 1, 1, 2))))
    return PatientProfile(
        diagnosis_chapter=diagnosis_chapter,
        med_truth=truth,
        distractor_drugs=distractors,
        team=team,
        coordinator=coordinator,
        consultant=consultant,
    )


def plan_notes(profile: PatientProfile, active: bool, rng: random.Random) -> NotePlan:
    """Decide which facts the patient's notes must carry."""
    plan = NotePlan()
    for med in profile.med_truth:
        if med.status == "current":
            # structured order always exists; notes affirm it most of the time
            forced = profile.diagnosis_chapter == "F2" and med.drug_class == "antipsychotic"
            if forced or rng.random() < 0.7:
                plan.facts.append(PlannedFact("med_current", canonical=med.canonical))
        elif med.status == "past":
            if rng.random() < 0.5:
                plan.facts.append(PlannedFact("med_past", canonical=med.canonical))
        elif med.status == "trialled":
            plan.facts.append(PlannedFact("med_past", canonical=med.canonical))
        else:  # considered_not_started
            category = "med_future" if rng.random() < 0.5 else "med_hypothetical"
            plan.facts.append(PlannedFact(category, canonical=med.canonical))
    for drug in profile.distractor_drugs:
        plan.facts.append(PlannedFact("med_negated", canonical=drug))

    if active:
        for measure, kinds in (("blood_pressure", ("bp",)), ("BMI", ("bmi",)),
                               ("glucose_or_HbA1c", ("hba1c", "hba1c_pct", "glucose")),
                               ("lipid_profile", ("lipid",))):
            if rng.random() < _PHYS_COMPLETION[measure]:
                plan.facts.append(
                    PlannedFact("measurement", meas_kind=rng.choice(kinds), in_window=True)
                )
            elif rng.random() < 0.4:  # stale observation only
                kind = rng.choice(kinds)
                past_kind = {"bp": "bp_past", "bmi": "bmi_past"}.get(kind, kind)
                plan.facts.append(PlannedFact("measurement", meas_kind=past_kind, in_window=False))
        for measure in ("smoking_status", "alcohol_use", "diet", "physical_activity"):
            if rng.random() < _PHYS_COMPLETION[measure]:
                tid = rng.choice(_LIFESTYLE_AFFIRMED[measure])
                plan.facts.append(PlannedFact("lifestyle", lifestyle_tid=tid, in_window=True))
            elif measure in _LIFESTYLE_NEGATED and rng.random() < 0.2:
                # negated status in window: recorded but must not complete the check
                tid = rng.choice(_LIFESTYLE_NEGATED[measure])
                plan.facts.append(PlannedFact("lifestyle", lifestyle_tid=tid, in_window=True))
    else:
        for _ in range(rng.randint(0, 2)):
            kind = rng.choice(("bmi", "bp", "hba1c", "glucose", "lipid"))
            plan.facts.append(PlannedFact("measurement", meas_kind=kind, in_window=False))

    base = 4 if active else 1
    plan.n_notes = base + rng.randint(0, 5 if active else 2)
    return plan


def _render_fact(fact: PlannedFact, rng: random.Random, lexicon: Lexicon, at_start_ok: bool = True):
    """Pick a template for a planned fact and render it."""
    if fact.category.startswith("med_"):
        template = rng.choice(MED_TEMPLATES[fact.category])
        entry = lexicon.entries[fact.canonical]
        surface = rng.choice(entry.synonyms) if rng.random() < 0.25 else fact.canonical
        slot_values = {"d": surface}
        if "{dose}" in template.text:
            slot_values["dose"] = rng.choice(DOSES)
        meta = {"d": (Entity.MEDICATION, fact.canonical, None, None)}
        return render_sentence(template, slot_values, meta)
    if fact.category in ("measurement", "measurement_past"):
        kind = fact.meas_kind
        templates = MEASUREMENT_PAST if kind.endswith("_past") else MEASUREMENT_PRESENT
        template = rng.choice(templates)
        phrase, values = sample_measurement(kind, rng)
        meta = {"m": (MEASUREMENT_ENTITY[kind], MEASUREMENT_ENTITY[kind].value, values, MEASUREMENT_UNIT[kind])}
        return render_sentence(template, {"m": phrase}, meta)
    if fact.category == "lifestyle":
        template = _LIFESTYLE_BY_ID[fact.lifestyle_tid]
        return render_sentence(template, {}, {})
    raise ValueError(fact.category)


def generate_notes(
    patient: PatientRecord,
    window: tuple[date, date],
    seed: int,
    plan: NotePlan | None = None,
    diagnosis_chapter: str = "none",
    lexicon: Lexicon | None = None,
    as_of: date = GENERATION_DATE,
) -> tuple[list[SourceDocument], list[LabelRecord]]:
    """Render a patient's notes for a window, with ground-truth labels.

    Deterministic in (patient, window, seed). A default plan is derived when
    none is supplied.
    """
    start, end = window
    if end < start:
        return [], []
    lexicon = lexicon or Lexicon.load()
    rng = random.Random(derive_seed(seed, "notes", patient.patient_id))
    if plan is None:
        profile = build_profile(diagnosis_chapter, patient.active, patient.borough, rng, lexicon)
        plan = plan_notes(profile, patient.active, rng)

    window_floor = max(start, as_of - timedelta(days=364))
    has_window = patient.active and end >= window_floor

    note_dates = sorted(_rand_date(rng, start, end) for _ in range(plan.n_notes))
    if has_window and not any(d >= window_floor for d in note_dates):
        note_dates[-1] = _rand_date(rng, window_floor, end)
        note_dates.sort()
    in_window_idx = [i for i, d in enumerate(note_dates) if d >= window_floor]
    all_idx = list(range(len(note_dates)))

    # Assign facts to notes; in-window facts stick to in-window notes.
    per_note: dict[int, list[PlannedFact]] = {i: [] for i in all_idx}
    for fact in plan.facts:
        pool = in_window_idx if (fact.in_window and in_window_idx) else all_idx
        per_note[rng.choice(pool)].append(fact)

    docs: list[SourceDocument] = []
    labels: list[LabelRecord] = []
    for i, note_date in enumerate(note_dates):
        doc_id = f"{patient.patient_id}-d{i:03d}"
        doc_type = rng.choices(("progress_note", "correspondence", "assessment"), (0.7, 0.15, 0.15))[0]
        sentences: list[tuple[str, list[RenderedFact]]] = [(rng.choice(OPENERS), [])]

        facts = per_note[i]
        rng.shuffle(facts)
        k = 0
        while k < len(facts):
            fact = facts[k]
            nxt = facts[k + 1] if k + 1 < len(facts) else None
            if (
                nxt is not None
                and {fact.category, nxt.category} == {"med_past", "med_current"}
                and rng.random() < 0.3
            ):
                past_fact = fact if fact.category == "med_past" else nxt
                cur_fact = nxt if fact.category == "med_past" else fact
                template = rng.choice(MED_SWITCH)
                slot_values = {"d": past_fact.canonical, "d2": cur_fact.canonical}
                meta = {
                    "d": (Entity.MEDICATION, past_fact.canonical, None, None),
                    "d2": (Entity.MEDICATION, cur_fact.canonical, None, None),
                }
                sentences.append(render_sentence(template, slot_values, meta))
                k += 2
                continue
            sentences.append(_render_fact(fact, rng, lexicon))
            k += 1

        for _ in range(rng.randint(1, 3)):
            sentences.append((rng.choice(FILLERS), []))
        sentences.append((rng.choice(CLOSERS), []))

        body_parts: list[str] = []
        offset = 0
        for text, facts_in_sentence in sentences:
            for rf in facts_in_sentence:
                labels.append(
                    LabelRecord(
                        doc_id=doc_id,
                        start=offset + rf.start,
                        end=offset + rf.end,
                        entity=rf.entity.value,
                        canonical=rf.canonical,
                        value={"values": list(rf.values), "unit": rf.unit} if rf.values else None,
                        polarity=rf.polarity,
                        temporality=rf.temporality,
                        certainty=rf.certainty,
                        surface=rf.surface,
                    )
                )
            body_parts.append(text)
            offset += len(text) + 1  # single space joiner
        docs.append(
            SourceDocument(
                doc_id=doc_id,
                patient_id=patient.patient_id,
                doc_type=doc_type,
                created_at=_ts(note_date, rng),
                body=" ".join(body_parts),
            )
        )
    return docs, labels


@dataclass
class CohortResult:
    store_path: Path
    patient_count: int
    document_count: int
    event_count: int
    label_count: int


def _patient_events(
    patient: PatientRecord,
    profile: PatientProfile,
    referral: date,
    end_of_care: date,
    rng: random.Random,
    lexicon: Lexicon,
    as_of: date,
) -> list[SourceEvent]:
    events: list[SourceEvent] = []
    counter = 0

    def add(kind: str, payload: dict, when: date) -> None:
        nonlocal counter
        events.append(
            SourceEvent(
                event_id=f"{patient.patient_id}-e{counter:04d}",
                patient_id=patient.patient_id,
                nhs_number=None,
                kind=kind,
                payload=payload,
                occurred_at=_ts(when, rng),
            )
        )
        counter += 1

    add("referral", {"source": rng.choice(("GP", "self", "acute", "other"))}, referral)
    episode_start = min(referral + timedelta(days=rng.randint(0, 14)), end_of_care)
    add(
        "team_episode",
        {
            "team_name": profile.team,
            "care_coordinator": profile.coordinator,
            "consultant": profile.consultant,
            "start_date": episode_start.isoformat(),
            "end_date": None if patient.active else end_of_care.isoformat(),
        },
        episode_start,
    )
    if profile.diagnosis_chapter != "none":
        dx_date = min(referral + timedelta(days=rng.randint(0, 180)), end_of_care)
        add("diagnosis", {"icd10_code": _icd10_code(profile.diagnosis_chapter, rng),
                          "chapter": profile.diagnosis_chapter}, dx_date)

    for med in profile.med_truth:
        if med.status not in ("current", "past"):
            continue  # trialled/considered are note-only by construction
        start_d = _rand_date(rng, referral, end_of_care)
        payload = {
            "drug_name": (
                rng.choice(lexicon.entries[med.canonical].synonyms)
                if rng.random() < 0.2 else med.canonical
            ),
            "dose": rng.choice(DOSES),
            "start_date": start_d.isoformat(),
            "end_date": None,
        }
        if med.status == "past":
            end_d = min(_rand_date(rng, start_d, end_of_care), as_of - timedelta(days=1))
            payload["end_date"] = end_d.isoformat()
        add("medication_order", payload, start_d)

    # structured labs; a sliver of rows are malformed (missing unit) to
    # exercise the quarantine path downstream
    for test_name, unit, lo, hi in (
        ("HbA1c", "mmol/mol", 28.0, 95.0),
        ("glucose", "mmol/L", 3.5, 14.0),
        ("total_cholesterol", "mmol/L", 2.8, 8.5),
    ):
        n_tests = rng.choice((0, 0, 1, 1, 2)) if patient.active else rng.choice((0, 0, 0, 1))
        for _ in range(n_tests):
            when = _rand_date(rng, referral, end_of_care)
            value = round(rng.uniform(lo, hi), 1)
            payload = {"test_name": test_name, "value": value, "unit": unit}
            if test_name == "HbA1c" and rng.random() < 0.15:
                payload["value"] = round((value / 10.929) + 2.15, 1)
                payload["unit"] = "%"
            if rng.random() < 0.005:
                payload.pop("unit")
            add("lab_result", payload, when)

    window_floor = max(referral, as_of - timedelta(days=364))
    if patient.active:
        recent = min(int(rng.expovariate(1 / 6.0)), 40)
        for _ in range(recent):
            add("contact", {"setting": rng.choice(("community", "home", "clinic", "phone")),
                            "attended": rng.random() < 0.85},
                _rand_date(rng, window_floor, end_of_care))
        for _ in range(rng.choices((0, 1, 2, 3, 4, 5), (75, 12, 6, 4, 2, 1))[0]):
            add("contact", {"setting": "crisis", "attended": True},
                _rand_date(rng, window_floor, end_of_care))
        for _ in range(rng.choices((0, 1, 2, 3, 4), (80, 11, 5, 3, 1))[0]):
            add("contact", {"setting": "ae", "attended": True},
                _rand_date(rng, window_floor, end_of_care))
    years = max(1, (end_of_care - referral).days // 365)
    for _ in range(min(rng.randint(0, 4 * years), 30)):
        add("contact", {"setting": rng.choice(("community", "home", "clinic", "phone")),
                        "attended": rng.random() < 0.85},
            _rand_date(rng, referral, end_of_care))
    ward_p = 0.2 if profile.diagnosis_chapter == "F2" else 0.06
    if rng.random() < ward_p:
        ws = _rand_date(rng, referral, end_of_care)
        we = min(ws + timedelta(days=rng.randint(3, 60)), end_of_care)
        add("ward_stay", {"ward_name": rng.choice(names.WARDS),
                          "start_date": ws.isoformat(), "end_date": we.isoformat()}, ws)
    return events


def _icd10_code(chapter: str, rng: random.Random) -> str:
    if chapter == "FX":
        return "FX"
    if chapter == "F99":
        return "F99"
    if chapter == "Z":
        return f"Z{rng.randint(0, 99):02d}"
    if chapter == "other_illness":
        return "OTH"  # opaque non-psychiatric category
    return f"{chapter}{rng.randint(0, 9)}"


def generate_cohort(seed: int, n: int, out_path: str | Path, as_of: date = GENERATION_DATE) -> CohortResult:
    """Generate an n-patient cohort store plus ground-truth sidecars."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lexicon = Lexicon.load()

    store = SourceStore.create(
        out_path,
        meta={
            "seed": str(seed),
            "n": str(n),
            "generated_at": as_of.isoformat(),
            "generator_version": GENERATOR_VERSION,
        },
    )

    strata_rng = random.Random(derive_seed(seed, "strata"))
    active_labels = demographics.quota_assignment(
        {"active": demographics.ACTIVE_FRACTION, "inactive": 100 - demographics.ACTIVE_FRACTION},
        n, strata_rng,
    )
    stratum_of = ["active" if lab == "active" else "inactive" for lab in active_labels]
    idx_by_stratum = {
        "active": [i for i, s in enumerate(stratum_of) if s == "active"],
        "inactive": [i for i, s in enumerate(stratum_of) if s == "inactive"],
    }
    attr_values: dict[str, list[str]] = {"gender": [""] * n, "ethnicity": [""] * n,
                                         "borough": [""] * n, "diagnosis": [""] * n}
    for attr, per_stratum in demographics.STRATUM_PCT.items():
        for stratum, indices in idx_by_stratum.items():
            rng = random.Random(derive_seed(seed, "attr", attr, stratum))
            labels = demographics.quota_assignment(per_stratum[stratum], len(indices), rng)
            for i, label in zip(indices, labels):
                attr_values[attr][i] = label

    patients: list[PatientRecord] = []
    all_docs: list[SourceDocument] = []
    all_events: list[SourceEvent] = []
    all_labels: list[LabelRecord] = []
    med_truth_rows: list[dict] = []
    linkage_rows: list[dict] = []

    link_rng = random.Random(derive_seed(seed, "linkage"))

    for i in range(n):
        pid = f"p-{i:06d}"
        nhs = f"999{i:07d}"
        stratum = stratum_of[i]
        active = stratum == "active"
        prng = random.Random(derive_seed(seed, "patient", i))

        age = demographics.sample_age(stratum, prng)
        age_days = int(age * 365.25)
        dob = as_of - timedelta(days=age_days)
        gender = attr_values["gender"][i]
        if gender == "female":
            given = names.GIVEN_FEMALE[prng.randrange(len(names.GIVEN_FEMALE))]
        elif gender == "male":
            given = names.GIVEN_MALE[prng.randrange(len(names.GIVEN_MALE))]
        else:
            pool = names.GIVEN_FEMALE + names.GIVEN_MALE
            given = pool[prng.randrange(len(pool))]
        family = names.FAMILY_NAMES[prng.randrange(len(names.FAMILY_NAMES))]

        if active:
            care_days = prng.randint(30, 2920)
            care_days = min(care_days, max(1, age_days - 1))
            referral = as_of - timedelta(days=care_days)
            end_of_care = as_of
        else:
            ref_ago = prng.randint(365, 7300)
            ref_ago = min(ref_ago, max(2, age_days - 1))
            referral = as_of - timedelta(days=ref_ago)
            duration = prng.randint(60, min(1825, max(61, ref_ago - 30)))
            end_of_care = min(referral + timedelta(days=duration), as_of - timedelta(days=30))
            if end_of_care < referral:
                end_of_care = referral

        patient = PatientRecord(
            patient_id=pid,
            given_name=given,
            family_name=family,
            nhs_number=nhs,
            dob=dob.isoformat(),
            gender=gender,
            ethnicity=attr_values["ethnicity"][i],
            borough=attr_values["borough"][i],
            gp_practice=names.GP_PRACTICES[prng.randrange(len(names.GP_PRACTICES))],
            active=active,
            created_at=_ts(referral, prng),
        )
        patients.append(patient)

        profile = build_profile(attr_values["diagnosis"][i], active, patient.borough, prng, lexicon)
        events = _patient_events(patient, profile, referral, end_of_care, prng, lexicon, as_of)

        plan = plan_notes(profile, active, prng)
        docs, labels = generate_notes(
            patient, (referral, end_of_care), seed, plan=plan, lexicon=lexicon, as_of=as_of
        )
        all_docs.extend(docs)
        all_labels.extend(labels)

        for med in profile.med_truth:
            med_truth_rows.append(
                {"patient_id": pid, "canonical": med.canonical,
                 "drug_class": med.drug_class, "status": med.status}
            )

        # ~1% of contact/lab rows arrive keyed by NHS number only
        for e_idx, event in enumerate(events):
            if event.kind in ("contact", "lab_result") and link_rng.random() < 0.01:
                events[e_idx] = SourceEvent(
                    event_id=event.event_id,
                    patient_id=None,
                    nhs_number=nhs,
                    kind=event.kind,
                    payload=event.payload,
                    occurred_at=event.occurred_at,
                )
                linkage_rows.append({"event_id": event.event_id, "patient_id": pid,
                                     "kind": "nhs_only", "nhs_number": nhs})
        all_events.extend(events)

        # one planted identity conflict per 10k patients
        if i > 0 and (i + 1) % 10000 == 0:
            conflict_event = SourceEvent(
                event_id=f"{pid}-conflict",
                patient_id=pid,
                nhs_number=patients[i - 1].nhs_number,
                kind="contact",
                payload={"setting": "clinic", "attended": True},
                occurred_at=_ts(end_of_care, prng),
            )
            all_events.append(conflict_event)
            linkage_rows.append({"event_id": conflict_event.event_id, "patient_id": pid,
                                 "kind": "conflict", "nhs_number": patients[i - 1].nhs_number})

    store.add_patients(patients)
    store.add_documents(all_docs)
    store.add_events(all_events)
    store.commit()

    sidecar_dir = out_path.parent
    all_labels.sort(key=lambda r: (r.doc_id, r.start))
    with open(sidecar_dir / "labels.jsonl", "w", encoding="utf-8") as fh:
        for rec in all_labels:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
    with open(sidecar_dir / "med_truth.jsonl", "w", encoding="utf-8") as fh:
        for row in med_truth_rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    with open(sidecar_dir / "linkage_truth.jsonl", "w", encoding="utf-8") as fh:
        for row in linkage_rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")

    result = CohortResult(
        store_path=out_path,
        patient_count=len(patients),
        document_count=len(all_docs),
        event_count=len(all_events),
        label_count=len(all_labels),
    )
    store.close()
    return result


def load_labels(path: str | Path) -> list[LabelRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(LabelRecord.from_json(json.loads(line)))
    return out
