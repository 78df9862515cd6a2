"""Governed panel execution: instantiate, authorize, run, mask, audit."""

from __future__ import annotations

import copy
from dataclasses import dataclass

from ..common import canonical_json, pseudonym, sha256_hex
from ..gov.audit import AuditEvent
from ..gov.authorize import authorize
from ..gov.mask import mask_row
from .dashboards import DashboardSpec, PanelSpec
from .state import AppState


class MalformedFilter(ValueError):
    pass


class PanelUnauthorized(PermissionError):
    def __init__(self, reason: str, audit_id: str):
        super().__init__(reason)
        self.reason = reason
        self.audit_id = audit_id


@dataclass
class PanelRequest:
    dashboard: DashboardSpec
    panel: PanelSpec
    filters: dict
    time_range: dict | None
    view: str | None = None  # "non_clinical" narrows a clinical session


def instantiate_query(req: PanelRequest) -> dict:
    """Template query plus shared filter values and the time range."""
    query = copy.deepcopy(req.panel.query)
    filters = list(query.get("filters", ()))
    for name, value in sorted(req.filters.items()):
        slot = req.dashboard.slot(name)
        if slot is None:
            raise MalformedFilter(f"filter {name!r} not in dashboard schema")
        if name not in req.panel.filter_slots:
            continue  # other panels may use it; this one does not
        if isinstance(value, list):
            filters.append({"field": slot.field, "in": value})
        elif isinstance(value, dict):
            filters.append({"field": slot.field, "range": value})
        else:
            filters.append({"field": slot.field, "eq": value})
    for slot in req.dashboard.filter_schema:
        if slot.required and slot.name not in req.filters:
            raise MalformedFilter(f"filter {slot.name!r} is required")
    if filters:
        query["filters"] = filters
    if req.time_range:
        if req.panel.time_field is None:
            pass  # panel is not time-scoped; shared range does not apply
        else:
            query["time_range"] = {
                "field": req.panel.time_field,
                "from": req.time_range.get("from"),
                "to": req.time_range.get("to"),
            }
    return query


def queried_fields(query: dict, agg: dict | None) -> tuple[str, ...]:
    fields = [f.get("field") for f in query.get("filters", ())]
    fields += [s.get("field") for s in query.get("sort", ()) if s.get("field") not in ("_score", "_key")]
    if query.get("time_range"):
        fields.append(query["time_range"].get("field"))
    if agg:
        fields += list(agg.get("group_by", ()))
        if agg.get("date_histogram"):
            fields.append(agg["date_histogram"].get("field"))
        metric = agg.get("metric", {})
        if metric.get("field"):
            fields.append(metric["field"])
    return tuple(f for f in fields if f)


def render_deep_link(template: str, patient_id: str) -> str:
    from urllib.parse import quote

    if "{patient_id}" not in template:
        raise KeyError("deep-link template missing {patient_id} slot")
    return template.replace("{patient_id}", quote(str(patient_id), safe=""))


def panel_data(state: AppState, session, req: PanelRequest) -> dict:
    """Execute one panel for a session; exactly one audit event per call."""
    effective_role = session.role
    if req.view == "non_clinical" and session.role == "clinical":
        effective_role = "non_clinical"  # voluntary narrowing only
    query = instantiate_query(req)
    fields_used = queried_fields(query, req.panel.agg)
    schema = state.engine.schema(req.panel.index)
    decision = authorize(
        effective_role, req.panel.index, state.policy,
        queried_fields=fields_used, all_fields=tuple(schema.fields),
    )
    query_hash = sha256_hex(canonical_json({"panel": req.panel.id, "query": query, "agg": req.panel.agg}))[:16]

    if decision.denied:
        audit_id = state.audit.append(AuditEvent(
            user=session.user, role=session.role, action="query", index=req.panel.index,
            query_hash=query_hash, result_count=0, decision="denied", reason=decision.reason,
        ))
        raise PanelUnauthorized(decision.reason, audit_id)

    if decision.doc_filter:
        query.setdefault("filters", []).append(decision.doc_filter)

    payload: dict = {
        "dashboard": req.dashboard.id,
        "panel": req.panel.id,
        "title": req.panel.title,
        "viz": req.panel.viz,
        "columns": list(req.panel.columns),
    }
    if req.panel.agg is not None:
        result = state.engine.aggregate(req.panel.index, query, req.panel.agg)
        payload["buckets"] = result.buckets
        payload["total"] = result.total_matching
        payload["stat"] = result.total_matching if not result.buckets or req.panel.viz == "stat" else None
        result_count = result.total_matching
    else:
        hits = state.engine.search(req.panel.index, query)
        rows = []
        highlights = {}
        clinical = effective_role == "clinical"
        for hit in hits.hits:
            masked = mask_row(dict(hit.doc), effective_role, state.policy, state.config.deployment_key)
            if decision.granted_fields is not None:
                masked = {
                    k: v for k, v in masked.items()
                    if k in decision.granted_fields or k == "birth_year"
                }
            # row identity for the UI: raw keys may embed patient ids, so
            # non-clinical rows get a keyed pseudonym instead
            masked["_key"] = hit.key if clinical else pseudonym(state.config.deployment_key, hit.key)
            rows.append(masked)
            if hit.highlights:
                highlights[masked["_key"]] = hit.highlights
        payload["rows"] = rows
        payload["total"] = hits.total
        if highlights:
            payload["highlights"] = highlights
        result_count = hits.total

    drill = None
    if req.panel.drilldown:
        drill = dict(req.panel.drilldown)
        if drill.get("patient_chart") and state.policy.role(effective_role).deep_links:
            drill["deep_link_template"] = state.config.deep_link_template
    payload["drilldown"] = drill

    audit_id = state.audit.append(AuditEvent(
        user=session.user, role=session.role, action="query", index=req.panel.index,
        query_hash=query_hash, result_count=result_count, decision="allowed",
    ))
    payload["audit_id"] = audit_id
    return payload
