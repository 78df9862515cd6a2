"""Patient chart bundle: catalogues, checklist, medication summary."""

from __future__ import annotations

from datetime import date

from ..caseload.catalogues import build_catalogues
from ..caseload.medication import medication_summary
from ..caseload.physical_health import physical_health_status
from ..gov.audit import AuditEvent
from ..gov.mask import mask_row, scrub_patient_ids
from .panels import render_deep_link
from .state import AppState


class UnknownPatient(KeyError):
    pass


class ChartUnauthorized(PermissionError):
    def __init__(self, reason: str, audit_id: str):
        super().__init__(reason)
        self.reason = reason
        self.audit_id = audit_id


def patient_chart(state: AppState, session, patient_ref: str) -> dict:
    """Chart for a patient id (clinical) or pseudonym (non-clinical).

    Clinical sessions get the identified bundle plus the source-EHR deep
    link; non-clinical sessions must use the pseudonymous reference and get
    masked output with no deep link.
    """
    role = session.role
    if role == "clinical":
        patient_id = patient_ref
    else:
        if not patient_ref.startswith("P-"):
            audit_id = state.audit.append(AuditEvent(
                user=session.user, role=role, action="query", index="caseload",
                query_hash="chart", result_count=0, decision="denied",
                reason="raw_patient_id_forbidden",
            ))
            raise ChartUnauthorized("non-clinical chart access requires a pseudonymous id", audit_id)
        resolved = state.pseudo_to_patient(patient_ref)
        if resolved is None:
            raise UnknownPatient(patient_ref)
        patient_id = resolved

    row = state.engine.get("caseload", patient_id)
    bundle = state.bundle(patient_id)
    if row is None or bundle is None:
        raise UnknownPatient(patient_ref)

    as_of = date.fromisoformat(row["as_of"])
    checklist = physical_health_status(bundle, as_of)
    summary = medication_summary(bundle, as_of)
    catalogues = build_catalogues(bundle, as_of)

    masked_row = mask_row(dict(row), role, state.policy, state.config.deployment_key)
    payload = {
        "patient": masked_row,
        "checklist": checklist.to_json(),
        "medication_summary": summary.to_json(),
        "catalogues": catalogues,
    }
    if role == "clinical" and state.policy.role(role).deep_links:
        payload["deep_link"] = render_deep_link(state.config.deep_link_template, patient_id)
    if role != "clinical":
        payload = scrub_patient_ids(payload, state.config.deployment_key)
        payload["patient_ref"] = patient_ref

    audit_id = state.audit.append(AuditEvent(
        user=session.user, role=role, action="query", index="caseload",
        query_hash="chart", result_count=1, decision="allowed",
    ))
    payload["audit_id"] = audit_id
    return payload
