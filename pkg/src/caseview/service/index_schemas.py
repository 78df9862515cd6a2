"""Field schemas for the five indices, shared by the pipeline loader and
dashboard lint so specs can be checked without live data."""

from __future__ import annotations

CASELOAD_FIELDS: dict[str, str] = {
    "patient_id": "keyword",
    "pseudo_id": "keyword",
    "given_name": "keyword",
    "family_name": "keyword",
    "nhs_number": "keyword",
    "dob": "date",
    "age": "numeric",
    "age_band": "keyword",
    "gender": "keyword",
    "ethnicity": "keyword",
    "borough": "keyword",
    "gp_practice": "keyword",
    "active": "bool",
    "team": "keyword",
    "care_coordinator": "keyword",
    "consultant": "keyword",
    "referral_date": "date",
    "duration_of_care_days": "numeric",
    "duration_band": "keyword",
    "discharge_date": "date",
    "primary_icd10_chapter": "keyword",
    "icd10_code": "keyword",
    "current_medications": "keyword",
    "medication_classes": "keyword",
    "last_antipsychotic": "keyword",
    "bmi_last": "numeric",
    "bmi_date": "date",
    "bp_sys_last": "numeric",
    "bp_dia_last": "numeric",
    "bp_date": "date",
    "hba1c_last": "numeric",
    "hba1c_date": "date",
    "glucose_last": "numeric",
    "glucose_date": "date",
    "lipid_last": "numeric",
    "lipid_date": "date",
    "phc_blood_pressure": "keyword",
    "phc_BMI": "keyword",
    "phc_glucose_or_HbA1c": "keyword",
    "phc_lipid_profile": "keyword",
    "phc_smoking_status": "keyword",
    "phc_alcohol_use": "keyword",
    "phc_diet": "keyword",
    "phc_physical_activity": "keyword",
    "phc_complete_count": "numeric",
    "contacts_12m": "numeric",
    "ae_attendances_12m": "numeric",
    "crisis_contacts_12m": "numeric",
    "complexity_score": "numeric",
    "risk_zone": "keyword",
    "unassigned": "bool",
    "as_of": "date",
}

SNAPSHOT_FIELDS = dict(CASELOAD_FIELDS, snapshot_date="date")

DOCUMENT_FIELDS: dict[str, str] = {
    "patient_id": "keyword",
    "doc_type": "keyword",
    "created_at": "date",
    "body": "text",
}

MENTION_FIELDS: dict[str, str] = {
    "doc_id": "keyword",
    "patient_id": "keyword",
    "pseudo_id": "keyword",
    "entity": "keyword",
    "canonical": "keyword",
    "drug_class": "keyword",
    "polarity": "keyword",
    "temporality": "keyword",
    "certainty": "keyword",
    "value_num": "numeric",
    "value_num2": "numeric",
    "unit": "keyword",
    "noted_at": "date",
    "snippet": "text",
    "team": "keyword",
    "borough": "keyword",
}

AUDIT_FIELDS: dict[str, str] = {
    "user": "keyword",
    "role": "keyword",
    "action": "keyword",
    "ts": "date",
    "target_index": "keyword",
    "decision": "keyword",
    "result_count": "numeric",
    "query_hash": "keyword",
}

INDEX_SCHEMAS: dict[str, dict[str, str]] = {
    "documents": DOCUMENT_FIELDS,
    "mentions": MENTION_FIELDS,
    "caseload": CASELOAD_FIELDS,
    "snapshots": SNAPSHOT_FIELDS,
    "audit": AUDIT_FIELDS,
}


def caseload_row_doc(row_json: dict) -> dict:
    """Flatten a caseload row (or snapshot row) into index fields."""
    measures = row_json.get("measures", {})
    phc = row_json.get("phc_status", {})

    def mv(slot: str, idx: int = 0):
        m = measures.get(slot)
        if not m:
            return None
        values = m.get("values") or []
        return values[idx] if idx < len(values) else None

    def mdate(slot: str):
        m = measures.get(slot)
        return m.get("date") if m else None

    doc = {
        key: row_json.get(key)
        for key in (
            "patient_id", "pseudo_id", "given_name", "family_name", "nhs_number",
            "dob", "age", "age_band", "gender", "ethnicity", "borough", "gp_practice",
            "active", "team", "care_coordinator", "consultant", "referral_date",
            "duration_of_care_days", "duration_band", "discharge_date",
            "primary_icd10_chapter", "icd10_code", "current_medications",
            "medication_classes", "last_antipsychotic", "phc_complete_count",
            "contacts_12m", "ae_attendances_12m", "crisis_contacts_12m",
            "complexity_score", "risk_zone", "unassigned", "as_of",
        )
    }
    doc.update(
        bmi_last=mv("bmi"), bmi_date=mdate("bmi"),
        bp_sys_last=mv("bp", 0), bp_dia_last=mv("bp", 1), bp_date=mdate("bp"),
        hba1c_last=mv("hba1c"), hba1c_date=mdate("hba1c"),
        glucose_last=mv("glucose"), glucose_date=mdate("glucose"),
        lipid_last=mv("lipid"), lipid_date=mdate("lipid"),
    )
    for measure, value in phc.items():
        doc[f"phc_{measure}"] = value
    return {k: v for k, v in doc.items() if v is not None}


def mention_doc(entity_payload: dict, valid_from: str, extra: dict) -> dict:
    """Flatten a NoteMention staging payload into index fields."""
    value = entity_payload.get("value") or {}
    values = value.get("values") or []
    doc = {
        "doc_id": entity_payload.get("doc_id"),
        "patient_id": entity_payload.get("patient_id"),
        "entity": entity_payload.get("entity"),
        "canonical": entity_payload.get("canonical"),
        "drug_class": entity_payload.get("drug_class"),
        "polarity": entity_payload.get("polarity"),
        "temporality": entity_payload.get("temporality"),
        "certainty": entity_payload.get("certainty"),
        "value_num": values[0] if values else None,
        "value_num2": values[1] if len(values) > 1 else None,
        "unit": value.get("unit"),
        "noted_at": valid_from,
        "snippet": entity_payload.get("snippet"),
    }
    doc.update(extra)
    return {k: v for k, v in doc.items() if v is not None}
