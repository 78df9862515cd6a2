"""HTTP API: auth, catalog, panels, chart, governance wiring."""

from __future__ import annotations

import json

import pytest

from caseview.gov.audit import AuditUnavailable
from caseview.gov.mask import build_identity_dictionary, find_leaks
from caseview.service.dashboards import lint_dashboards, load_dashboards
from caseview.service.panels import render_deep_link


def _query_events(state):
    return [r for r in state.audit.records() if r["action"] == "query"]


class TestLogin:
    def test_valid_credential_issues_token_and_audits(self, api):
        state = api["state"]
        before = len(state.audit.records())
        response = api["client"].post(
            "/v1/login", json={"username": "dr_ellis", "password": "clinical-dev-password"})
        assert response.status_code == 200
        body = response.json()
        assert body["role"] == "clinical" and body["token"]
        records = state.audit.records()
        assert len(records) == before + 1
        assert records[-1]["action"] == "login" and records[-1]["decision"] == "allowed"

    def test_bad_credential_denied_and_audited(self, api):
        state = api["state"]
        before = len(state.audit.records())
        response = api["client"].post(
            "/v1/login", json={"username": "dr_ellis", "password": "wrong"})
        assert response.status_code == 401
        assert response.json()["detail"]["code"] == "invalid_credential"
        records = state.audit.records()
        assert records[-1]["decision"] == "denied" and len(records) == before + 1

    def test_missing_token_rejected(self, api):
        assert api["client"].get("/v1/dashboards").status_code == 401

    def test_garbage_token_rejected(self, api):
        response = api["client"].get(
            "/v1/dashboards", headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401


class TestCatalog:
    def test_clinical_sees_all_categories(self, api):
        body = api["client"].get("/v1/dashboards", headers=api["clinical"]).json()
        categories = body["categories"]
        assert sum(len(v) for v in categories.values()) >= 8
        assert all(len(categories[c]) >= 2 for c in
                   ("population_health", "clinical_pathways", "caseload_management", "patient_chart"))

    def test_non_clinical_catalog_is_subset(self, api):
        clinical = api["client"].get("/v1/dashboards", headers=api["clinical"]).json()["categories"]
        non_clinical = api["client"].get("/v1/dashboards", headers=api["non_clinical"]).json()["categories"]
        for category, entries in non_clinical.items():
            clinical_ids = {d["id"] for d in clinical[category]}
            assert {d["id"] for d in entries} <= clinical_ids

    def test_patient_chart_absent_for_non_clinical(self, api):
        non_clinical = api["client"].get(
            "/v1/dashboards", headers=api["non_clinical"]).json()["categories"]
        assert non_clinical["patient_chart"] == []


class TestPanels:
    def test_coordinator_panel_equals_module_rollup(self, api, small_rows):
        team = next(r.team for r in small_rows if r.active and r.team)
        response = api["client"].post(
            "/v1/dashboards/caseload-coordinators/panels/per-coordinator/data",
            headers=api["clinical"], json={"filters": {"team": team}})
        assert response.status_code == 200
        buckets = {tuple(b["key"])[0]: b["count"] for b in response.json()["buckets"]}

        from caseview.caseload.distribution import UNASSIGNED, caseload_distribution

        table = caseload_distribution(small_rows, team)
        expected = {
            row["coordinator"]: row["patients"] for row in table.rows
            if row["coordinator"] != UNASSIGNED
        }
        assert buckets == expected

    def test_match_none_filter_keeps_schema(self, api):
        response = api["client"].post(
            "/v1/dashboards/population-overview/panels/by-gender/data",
            headers=api["clinical"], json={"filters": {"team": "No Such Team"}})
        body = response.json()
        assert response.status_code == 200
        assert body["buckets"] == [] and body["total"] == 0
        assert body["viz"] == "bar" and body["audit_id"]

    def test_malformed_filter_rejected(self, api):
        response = api["client"].post(
            "/v1/dashboards/population-overview/panels/by-gender/data",
            headers=api["clinical"], json={"filters": {"not_a_slot": "x"}})
        assert response.status_code == 400
        assert response.json()["detail"]["code"] == "malformed_filter"

    def test_required_filter_enforced(self, api):
        response = api["client"].post(
            "/v1/dashboards/patient-overview/panels/demographics/data",
            headers=api["clinical"], json={"filters": {}})
        assert response.status_code == 400

    def test_unknown_dashboard_and_panel(self, api):
        assert api["client"].post(
            "/v1/dashboards/nope/panels/x/data", headers=api["clinical"], json={}
        ).status_code == 404
        assert api["client"].post(
            "/v1/dashboards/population-overview/panels/nope/data",
            headers=api["clinical"], json={},
        ).status_code == 404

    def test_non_clinical_rows_pseudonymized_no_leaks(self, api, small_source):
        response = api["client"].post(
            "/v1/dashboards/caseload-coordinators/panels/caseload-table/data",
            headers=api["non_clinical"], json={"filters": {}})
        assert response.status_code == 200
        body = response.json()
        assert body["rows"]
        dictionary = build_identity_dictionary(small_source.iter_patients())
        assert find_leaks(json.dumps(body), dictionary) == []
        for row in body["rows"]:
            assert "given_name" not in row and "nhs_number" not in row
            assert row["patient_id"].startswith("P-")
            assert "deep_link_template" not in (body["drilldown"] or {})

    def test_clinical_rows_identified_with_deep_link(self, api):
        response = api["client"].post(
            "/v1/dashboards/caseload-coordinators/panels/caseload-table/data",
            headers=api["clinical"], json={"filters": {}})
        body = response.json()
        assert body["rows"][0]["patient_id"].startswith("p-")
        assert body["drilldown"]["deep_link_template"].startswith("https://")

    def test_non_clinical_documents_index_denied_and_audited(self, api):
        state = api["state"]
        before = [r for r in state.audit.records() if r["decision"] == "denied"]
        response = api["client"].post(
            "/v1/dashboards/patient-overview/panels/recent-notes/data",
            headers=api["non_clinical"], json={"filters": {"patient_id": "p-000001"}})
        assert response.status_code == 403
        detail = response.json()["detail"]
        assert detail["code"] == "unauthorized" and detail["audit_id"]
        denied = [r for r in state.audit.records() if r["decision"] == "denied"]
        assert len(denied) == len(before) + 1

    def test_shard_down_fails_closed(self, api):
        state = api["state"]
        state.engine.set_shard_down("caseload", 1)
        try:
            response = api["client"].post(
                "/v1/dashboards/population-overview/panels/by-gender/data",
                headers=api["clinical"], json={"filters": {}})
            assert response.status_code == 503
            assert response.json()["detail"]["code"] == "shard_unavailable"
        finally:
            state.engine.set_shard_down("caseload", 1, down=False)

    def test_audit_unavailable_fails_request(self, api, monkeypatch):
        state = api["state"]

        def broken(_event):
            raise AuditUnavailable("disk full")

        monkeypatch.setattr(state.audit, "append", broken)
        response = api["client"].post(
            "/v1/dashboards/population-overview/panels/by-gender/data",
            headers=api["clinical"], json={"filters": {}})
        assert response.status_code == 503
        assert response.json()["code"] == "audit_unavailable"

    def test_every_data_response_audited_exactly_once(self, api):
        state = api["state"]
        before = len(_query_events(state))
        calls = [
            ("population-overview", "by-gender", {}),
            ("population-overview", "borough-map", {}),
            ("caseload-complexity", "zones", {}),
            ("pathways-psychosis", "antipsychotic-patterns", {}),
        ]
        for dashboard, panel, filters in calls:
            response = api["client"].post(
                f"/v1/dashboards/{dashboard}/panels/{panel}/data",
                headers=api["clinical"], json={"filters": filters})
            assert response.status_code == 200
        assert len(_query_events(state)) == before + len(calls)

    def test_highlights_for_text_query_panel(self, api, tmp_path):
        """Free-text search over notes returns marker-wrapped snippets."""
        state = api["state"]
        hits = state.engine.search("documents", {"text": {"terms": ["olanzapine"]}, "size": 3})
        if hits.total:
            assert hits.hits[0].highlights
            assert "[[" in hits.hits[0].highlights[0]


class TestChart:
    def _some_patient(self, api):
        response = api["client"].post(
            "/v1/dashboards/pathways-psychosis/panels/f2-patients/data",
            headers=api["clinical"], json={"filters": {}})
        rows = response.json()["rows"]
        assert rows
        return rows[0]["patient_id"]

    def test_clinical_chart_bundle(self, api):
        pid = self._some_patient(api)
        response = api["client"].get(f"/v1/patients/{pid}/chart", headers=api["clinical"])
        assert response.status_code == 200
        body = response.json()
        assert body["patient"]["patient_id"] == pid
        assert body["deep_link"].endswith(pid)
        assert set(body["catalogues"]) >= {"medication", "contact", "diagnosis", "test_result", "BMI"}
        assert body["checklist"]["measures"]
        for item in body["medication_summary"]["items"]:
            assert item["tag"] in ("current", "past", "trialled", "considered_not_started")
            assert item["evidence"]

    def test_medication_timeline_matches_catalogue(self, api, small_bundles):
        pid = self._some_patient(api)
        response = api["client"].get(f"/v1/patients/{pid}/chart", headers=api["clinical"])
        timeline = response.json()["catalogues"]["medication"]
        bundle = small_bundles[pid]
        expected = len(bundle.orders) + sum(
            1 for m in bundle.mentions if m.payload["entity"] == "medication")
        assert len(timeline) == expected
        whens = [e["when"] for e in timeline]
        assert whens == sorted(whens)

    def test_unknown_patient_404(self, api):
        assert api["client"].get(
            "/v1/patients/p-999999/chart", headers=api["clinical"]).status_code == 404

    def test_non_clinical_raw_id_forbidden(self, api):
        pid = self._some_patient(api)
        response = api["client"].get(f"/v1/patients/{pid}/chart", headers=api["non_clinical"])
        assert response.status_code == 403

    def test_non_clinical_pseudo_chart_masked(self, api, small_source):
        pid = self._some_patient(api)
        pseudo = api["state"].engine.get("caseload", pid)["pseudo_id"]
        response = api["client"].get(f"/v1/patients/{pseudo}/chart", headers=api["non_clinical"])
        assert response.status_code == 200
        body = response.json()
        assert "deep_link" not in body
        assert "given_name" not in body["patient"]
        dictionary = build_identity_dictionary(small_source.iter_patients())
        assert find_leaks(json.dumps(body), dictionary) == []
        assert pid not in json.dumps(body)

    def test_monotone_privilege_chart(self, api):
        """Non-clinical chart fields are a projection of the clinical ones."""
        pid = self._some_patient(api)
        pseudo = api["state"].engine.get("caseload", pid)["pseudo_id"]
        clinical = api["client"].get(
            f"/v1/patients/{pid}/chart", headers=api["clinical"]).json()
        non_clinical = api["client"].get(
            f"/v1/patients/{pseudo}/chart", headers=api["non_clinical"]).json()
        allowed_extra = {"birth_year"}
        patient_fields = set(non_clinical["patient"]) - allowed_extra
        assert patient_fields <= set(clinical["patient"])


class TestAuditStats:
    def test_series_equals_recount(self, api):
        state = api["state"]
        response = api["client"].get(
            "/v1/audit/stats?start=2020-01-01&end=2030-01-01&interval=week",
            headers=api["clinical"])
        assert response.status_code == 200
        series = response.json()["series"]
        # recount excludes the event this very request appended afterwards
        records = [r for r in state.audit.records()][:-1]
        total_requests = sum(1 for r in records if r["action"] in ("query", "export"))
        assert sum(p["requests"] for p in series) == total_requests

    def test_bad_interval_rejected(self, api):
        response = api["client"].get(
            "/v1/audit/stats?start=2020-01-01&end=2030-01-01&interval=century",
            headers=api["clinical"])
        assert response.status_code == 400


class TestDeepLink:
    def test_render_substitution(self):
        assert render_deep_link(
            "https://ehr.local/patient/{patient_id}", "p-001"
        ) == "https://ehr.local/patient/p-001"

    def test_percent_encoding(self):
        assert render_deep_link(
            "https://ehr.local/patient/{patient_id}", "p 0/1"
        ) == "https://ehr.local/patient/p%200%2F1"

    def test_missing_slot_rejected(self):
        with pytest.raises(KeyError):
            render_deep_link("https://ehr.local/patient/", "p-001")


class TestDashboardLint:
    def test_bundled_dashboards_clean(self):
        specs = load_dashboards()
        assert len(specs) >= 8
        assert lint_dashboards(specs) == []

    def test_lint_catches_bad_references(self, tmp_path):
        bad = {
            "id": "broken", "category": "nope", "title": "x",
            "filter_schema": [{"name": "t", "field": "not_a_field"}],
            "panels": [{
                "id": "p1", "viz": "sparkline", "index": "caseload",
                "query": {"filters": [{"field": "ghost", "eq": 1}]},
                "agg": {"group_by": ["phantom"]},
                "filter_slots": ["t", "unknown_slot"],
                "drilldown": {"target": "missing-dashboard"},
            }],
        }
        (tmp_path / "broken.json").write_text(json.dumps(bad))
        problems = lint_dashboards(load_dashboards(tmp_path))
        text = "\n".join(problems)
        for needle in ("bad category", "bad viz", "ghost", "phantom",
                       "unknown_slot", "missing-dashboard", "not_a_field"):
            assert needle in text


class TestHealth:
    def test_health_lists_indices(self, api):
        body = api["client"].get("/v1/health").json()
        assert set(body["indices"]) == {"documents", "mentions", "caseload", "snapshots", "audit"}


class TestAdminEndpoints:
    def test_admin_requires_clinical_role(self, api):
        response = api["client"].post(
            "/v1/admin/pipeline/sync", headers=api["non_clinical"],
            json={"as_of": "2025-06-30"})
        assert response.status_code == 403

    def test_admin_steps_share_exclusive_lock(self, api, small_ws):
        state = api["state"]
        assert state.admin_lock.acquire(blocking=False)
        try:
            for step in ("sync", "build", "snapshot", "run-all"):
                response = api["client"].post(
                    f"/v1/admin/pipeline/{step}", headers=api["clinical"],
                    json={"as_of": small_ws["as_of"].isoformat()})
                assert response.status_code == 409, step
        finally:
            state.admin_lock.release()

    def test_admin_sync_idempotent_rerun(self, api, small_ws):
        response = api["client"].post(
            "/v1/admin/pipeline/sync", headers=api["clinical"],
            json={"as_of": small_ws["as_of"].isoformat()})
        assert response.status_code == 200
        report = response.json()["summary"]["sync"]
        inserted = sum(per["inserted"] for per in report["counts"].values())
        assert inserted == 0

    def test_admin_snapshot_duplicate_conflict(self, api, small_ws):
        as_of = small_ws["as_of"].isoformat()
        build = api["client"].post(
            "/v1/admin/pipeline/build", headers=api["clinical"], json={"as_of": as_of})
        assert build.status_code == 200
        snap = api["client"].post(
            "/v1/admin/pipeline/snapshot", headers=api["clinical"], json={"as_of": as_of})
        assert snap.status_code == 409  # pipeline already snapshotted this date


class TestPanelInvariants:
    def test_payload_repeatable_within_manifest(self, api):
        """Same spec + filters + committed manifest -> same data payload."""
        results = []
        for _ in range(2):
            response = api["client"].post(
                "/v1/dashboards/caseload-coordinators/panels/caseload-table/data",
                headers=api["clinical"], json={"filters": {}})
            body = response.json()
            body.pop("audit_id")
            results.append(body)
        assert results[0] == results[1]

    def test_monotone_privilege_rows(self, api):
        """Non-clinical row fields are a projection of the clinical ones."""
        clinical = api["client"].post(
            "/v1/dashboards/caseload-complexity/panels/red-zone-table/data",
            headers=api["clinical"], json={"filters": {}}).json()
        non_clinical = api["client"].post(
            "/v1/dashboards/caseload-complexity/panels/red-zone-table/data",
            headers=api["non_clinical"], json={"filters": {}}).json()
        assert non_clinical["total"] == clinical["total"]
        allowed_extra = {"birth_year"}
        clinical_fields = set().union(*(set(r) for r in clinical["rows"])) if clinical["rows"] else set()
        for row in non_clinical["rows"]:
            assert set(row) - allowed_extra <= clinical_fields


class TestTokenExpiry:
    def test_expired_token_rejected(self, small_ws):
        from fastapi.testclient import TestClient

        from caseview.config import AppConfig
        from caseview.service.app import create_app
        from caseview.service.auth import SessionStore
        from caseview.service.state import AppState

        config = AppConfig.load(small_ws["ws"] / "config.yaml")
        state = AppState.from_config(config)
        state.sessions = SessionStore(config.users, ttl_seconds=0)  # everything expires at once
        client = TestClient(create_app(state))
        token = client.post(
            "/v1/login", json={"username": "dr_ellis", "password": "clinical-dev-password"}
        ).json()["token"]
        response = client.get("/v1/dashboards", headers={"Authorization": f"Bearer {token}"})
        assert response.status_code == 401
        assert "expired" in response.json()["detail"]["message"]
