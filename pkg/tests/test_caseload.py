"""Caseload model: build, rollups, snapshots, complexity, distribution."""

from __future__ import annotations

import json
from datetime import date, timedelta

import pytest
from hypothesis import given, settings, strategies as st

from caseview.caseload import (
    CHECKLIST_MEASURES,
    ComplexityConfig,
    DuplicateSnapshot,
    SnapshotCorrupt,
    SnapshotStore,
    UNASSIGNED,
    UnknownTeam,
    caseload_distribution,
    complexity_score,
    medication_summary,
    monthly_completion_series,
    physical_health_status,
)
from caseview.caseload.build import PatientBundle, build_row
from caseview.etl.staging import StagingEntity


def _patient_entity(pid="p-test01", active=True) -> StagingEntity:
    return StagingEntity(
        entity_id=f"Patient:{pid}", entity_class="Patient", patient_key=pid,
        payload={
            "patient_id": pid, "given_name": "Verity", "family_name": "Kestrel",
            "nhs_number": "9991112223", "dob": "1985-03-10", "gender": "female",
            "ethnicity": "White", "borough": "Lambeth", "gp_practice": "G81001",
            "active": active,
        },
        source_refs=[("patients", pid)], valid_from="2023-01-05T09:00:00",
    )


def _mention_entity(pid, doc, start, entity, canonical, when, polarity="affirmed",
                    temporality="present", certainty="confirmed", value=None) -> StagingEntity:
    return StagingEntity(
        entity_id=f"NoteMention:{doc}:{start}", entity_class="NoteMention", patient_key=pid,
        payload={
            "doc_id": doc, "start": start, "end": start + 5, "entity": entity,
            "canonical": canonical, "value": value, "polarity": polarity,
            "temporality": temporality, "certainty": certainty,
            "snippet": f"... {canonical} ...", "patient_id": pid,
            "drug_class": "antipsychotic" if entity == "medication" else None,
        },
        source_refs=[("documents", doc)], valid_from=when,
    )


def _order_entity(pid, event_id, drug, start_date, end_date=None, when=None) -> StagingEntity:
    return StagingEntity(
        entity_id=f"MedicationOrder:{event_id}", entity_class="MedicationOrder",
        patient_key=pid,
        payload={"drug_name": drug, "drug_class": "antipsychotic", "dose": "10mg",
                 "start_date": start_date, "end_date": end_date},
        source_refs=[("events", event_id)], valid_from=when or f"{start_date}T10:00:00",
    )


AS_OF = date(2025, 6, 30)


class TestBuildRow:
    def test_patient_with_no_events_gets_demographic_row(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        row = build_row(bundle, AS_OF, "key", ComplexityConfig(), {})
        assert row.patient_id == "p-test01"
        assert row.team is None
        assert row.current_medications == []
        assert row.complexity_score >= 0

    def test_latest_bmi_wins(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 10, "BMI", "BMI", "2025-01-10T09:00:00",
            value={"values": [24.0], "unit": "kg/m2"}))
        bundle.mentions.append(_mention_entity(
            "p-test01", "d2", 10, "BMI", "BMI", "2025-04-02T09:00:00",
            value={"values": [27.5], "unit": "kg/m2"}))
        row = build_row(bundle, AS_OF, "key", ComplexityConfig(), {})
        assert row.measures["bmi"]["values"] == [27.5]
        assert row.measures["bmi"]["date"] == "2025-04-02"

    def test_uniqueness_one_row_per_patient(self, small_rows):
        ids = [r.patient_id for r in small_rows]
        assert len(ids) == len(set(ids))

    def test_row_count_and_active_fraction_match_source(self, small_rows, small_source):
        patients = list(small_source.iter_patients())
        assert len(small_rows) == len(patients)
        assert sum(r.active for r in small_rows) == sum(p.active for p in patients)

    def test_unassigned_iff_active_without_coordinator(self, small_rows):
        for row in small_rows:
            assert row.unassigned == (row.active and not row.care_coordinator)

    def test_duration_matches_referral(self, small_rows):
        for row in small_rows:
            if row.active and row.referral_date:
                expected = (AS_OF - date.fromisoformat(row.referral_date)).days
                assert row.duration_of_care_days == expected

    def test_latest_values_equal_bruteforce_scan(self, small_rows, small_bundles):
        """Latest-value semantics against a naive max-timestamp pass."""
        for row in small_rows[:100]:
            bundle = small_bundles[row.patient_id]
            best = {}
            for m in bundle.mentions:
                p = m.payload
                if p["entity"] != "BMI" or p.get("value") is None:
                    continue
                key = (m.valid_from, m.entity_id)
                if "bmi" not in best or key > best["bmi"][0]:
                    best["bmi"] = (key, p["value"]["values"])
            if "bmi" in best:
                assert row.measures["bmi"]["values"] == best["bmi"][1]
            else:
                assert "bmi" not in row.measures


class TestChecklist:
    def test_recent_note_bmi_completes_with_mention_provenance(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 10, "BMI", "BMI", "2025-03-30T09:00:00",
            value={"values": [25.0], "unit": "kg/m2"}))
        checklist = physical_health_status(bundle, AS_OF)
        assert checklist.measures["BMI"]["status"] == "complete"
        assert checklist.measures["BMI"]["source"][0] == "NoteMention"

    def test_brand_new_patient_all_due(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        checklist = physical_health_status(bundle, AS_OF)
        assert all(m["status"] == "due" for m in checklist.measures.values())
        assert checklist.complete_count == 0

    def test_negated_smoking_does_not_complete(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 4, "smoking_status", "smoking_status",
            "2025-05-01T09:00:00", polarity="negated"))
        checklist = physical_health_status(bundle, AS_OF)
        assert checklist.measures["smoking_status"]["status"] == "due"

    def test_observation_just_outside_window_does_not_complete(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        stale = (AS_OF - timedelta(days=365)).isoformat()
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 10, "BMI", "BMI", f"{stale}T09:00:00",
            value={"values": [25.0], "unit": "kg/m2"}))
        checklist = physical_health_status(bundle, AS_OF)
        assert checklist.measures["BMI"]["status"] == "due"

    def test_checklist_equals_bruteforce_for_cohort(self, small_bundles):
        """Independent window scan over raw staged entities."""
        window_start = (AS_OF - timedelta(days=365)).isoformat()
        lab_measure = {"HbA1c": "glucose_or_HbA1c", "glucose": "glucose_or_HbA1c",
                       "total_cholesterol": "lipid_profile"}
        mention_measure = {"BMI": "BMI", "blood_pressure": "blood_pressure",
                           "HbA1c": "glucose_or_HbA1c", "glucose": "glucose_or_HbA1c",
                           "lipid_profile": "lipid_profile",
                           "smoking_status": "smoking_status", "alcohol_use": "alcohol_use",
                           "diet": "diet", "physical_activity": "physical_activity"}
        for pid, bundle in small_bundles.items():
            if bundle.patient is None:
                continue
            expected = {m: "due" for m in CHECKLIST_MEASURES}
            for lab in bundle.labs:
                measure = lab_measure.get(lab.payload.get("test_name", ""))
                if measure and window_start < lab.valid_from[:10] <= AS_OF.isoformat():
                    expected[measure] = "complete"
            for m in bundle.mentions:
                p = m.payload
                measure = mention_measure.get(p["entity"])
                qualifying = (p["polarity"], p["temporality"], p["certainty"]) == (
                    "affirmed", "present", "confirmed")
                if measure and qualifying and window_start < m.valid_from[:10] <= AS_OF.isoformat():
                    expected[measure] = "complete"
            actual = physical_health_status(bundle, AS_OF)
            assert {k: v["status"] for k, v in actual.measures.items()} == expected, pid

    def test_monthly_series_equals_naive_recount(self, small_bundles, small_rows):
        team = next(r.team for r in small_rows if r.active and r.team)
        pids = [r.patient_id for r in small_rows if r.team == team and r.active]
        series = monthly_completion_series(
            small_bundles, pids, AS_OF - timedelta(days=150), AS_OF)
        assert series
        # independent recount of the observation counts per month
        for point in series:
            month = point["month"]
            recount = 0
            for pid in pids:
                for obs in small_bundles[pid].observations():
                    if obs.counts_for_check and obs.when[:7] == month:
                        recount += 1
            assert point["measures_completed_total"] == recount
            for rate in point["completion_rate"].values():
                assert 0.0 <= rate <= 1.0


class TestMedicationSummary:
    def test_structured_plus_past_mention(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.orders.append(_order_entity("p-test01", "e1", "olanzapine", "2025-02-01"))
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 4, "medication", "sertraline",
            "2024-10-01T09:00:00", temporality="past"))
        summary = medication_summary(bundle, AS_OF)
        assert summary.tags() == {"olanzapine": "current", "sertraline": "trialled"}

    def test_empty_patient(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        assert medication_summary(bundle, AS_OF).items == []

    def test_considered_not_started(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 4, "medication", "lithium",
            "2025-05-01T09:00:00", certainty="hypothetical"))
        summary = medication_summary(bundle, AS_OF)
        assert summary.tags() == {"lithium": "considered_not_started"}

    def test_negated_mention_asserts_nothing(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 4, "medication", "clozapine",
            "2025-05-01T09:00:00", polarity="negated"))
        assert medication_summary(bundle, AS_OF).items == []

    def test_ended_order_is_past(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.orders.append(_order_entity("p-test01", "e1", "quetiapine",
                                           "2024-01-01", end_date="2024-06-01"))
        assert medication_summary(bundle, AS_OF).tags() == {"quetiapine": "past"}

    def test_evidence_carries_snippets(self):
        bundle = PatientBundle(patient_id="p-test01", patient=_patient_entity())
        bundle.mentions.append(_mention_entity(
            "p-test01", "d1", 4, "medication", "sertraline", "2025-05-01T09:00:00"))
        item = medication_summary(bundle, AS_OF).items[0]
        assert any(e.get("snippet") for e in item.evidence)

    def test_med_truth_recall_on_cohort(self, small_ws, small_bundles):
        truth_rows = [json.loads(l) for l in open(small_ws["ws"] / "med_truth.jsonl")]
        assert truth_rows
        by_pid: dict[str, list[dict]] = {}
        for row in truth_rows:
            by_pid.setdefault(row["patient_id"], []).append(row)
        for pid, entries in by_pid.items():
            tags = medication_summary(small_bundles[pid], AS_OF).tags()
            for entry in entries:
                assert tags.get(entry["canonical"]) == entry["status"], (pid, entry)


class TestComplexity:
    def test_zero_factors_zero_green(self):
        score, zone = complexity_score(0, 0, "none", "lt_1y")
        assert score == 0.0 and zone == "green"

    def test_one_ae_attendance_strictly_increases(self):
        base, _ = complexity_score(2, 1, "F2", "1_3y")
        more, _ = complexity_score(2, 2, "F2", "1_3y")
        assert more > base

    @given(crisis=st.integers(0, 10), ae=st.integers(0, 10),
           chapter=st.sampled_from(["F0", "F2", "F3", "none", "Z"]),
           band=st.sampled_from(["lt_1y", "1_3y", "gt_3y"]))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_each_factor(self, crisis, ae, chapter, band):
        score, _ = complexity_score(crisis, ae, chapter, band)
        assert complexity_score(crisis + 1, ae, chapter, band)[0] > score
        assert complexity_score(crisis, ae + 1, chapter, band)[0] > score

    @given(factor=st.floats(0.1, 10.0, allow_nan=False))
    @settings(max_examples=30, deadline=None)
    def test_argmax_invariant_under_positive_rescaling(self, factor, small_rows):
        config = ComplexityConfig()
        scaled = config.scaled(factor)
        team_rows = [r for r in small_rows if r.active][:50]
        if not team_rows:
            return

        def argmax(cfg):
            return max(
                team_rows,
                key=lambda r: (complexity_score(
                    r.crisis_contacts_12m, r.ae_attendances_12m,
                    r.primary_icd10_chapter, r.duration_band_label, cfg)[0], r.patient_id),
            ).patient_id

        assert argmax(config) == argmax(scaled)

    def test_red_zone_set_equals_bruteforce(self, small_rows):
        config = ComplexityConfig()
        expected_red = set()
        for row in small_rows:
            score, _ = complexity_score(
                row.crisis_contacts_12m, row.ae_attendances_12m,
                row.primary_icd10_chapter, row.duration_band_label, config)
            if score >= config.red_threshold:
                expected_red.add(row.patient_id)
        assert {r.patient_id for r in small_rows if r.risk_zone == "red"} == expected_red


class TestDistribution:
    def test_rows_sum_to_team_active_caseload(self, small_rows):
        team = next(r.team for r in small_rows if r.active and r.team)
        table = caseload_distribution(small_rows, team)
        naive = [r for r in small_rows if r.team == team and r.active]
        assert table.total == len(naive)
        assert sum(row["patients"] for row in table.rows) == len(naive)

    def test_unknown_team_raises(self, small_rows):
        with pytest.raises(UnknownTeam):
            caseload_distribution(small_rows, "No Such Team")

    def test_group_by_equals_naive(self, small_rows):
        team = next(r.team for r in small_rows if r.active and r.team)
        table = caseload_distribution(small_rows, team)
        for slot in table.rows:
            coordinator = None if slot["coordinator"] == UNASSIGNED else slot["coordinator"]
            naive = [
                r for r in small_rows
                if r.team == team and r.active and r.care_coordinator == coordinator
            ]
            assert slot["patients"] == len(naive)
            assert slot["zones"]["red"] == sum(1 for r in naive if r.risk_zone == "red")


class TestSnapshots:
    def test_snapshot_roundtrip_verifies(self, small_rows, tmp_path):
        store = SnapshotStore(tmp_path)
        snap = store.snapshot_caseload(small_rows, "2025-06-30")
        rows = store.load("2025-06-30")
        assert len(rows) == snap.row_count == len(small_rows)
        assert store.verify_all() == {"2025-06-30": True}

    def test_duplicate_date_rejected(self, small_rows, tmp_path):
        store = SnapshotStore(tmp_path)
        store.snapshot_caseload(small_rows, "2025-06-30")
        with pytest.raises(DuplicateSnapshot):
            store.snapshot_caseload(small_rows, "2025-06-30")

    def test_tampering_detected(self, small_rows, tmp_path):
        store = SnapshotStore(tmp_path)
        store.snapshot_caseload(small_rows, "2025-06-30")
        path = tmp_path / "2025-06-30.jsonl"
        blob = path.read_bytes().replace(b'"active":true', b'"active":false', 1)
        assert b'"active":false' in blob
        path.write_bytes(blob)
        with pytest.raises(SnapshotCorrupt):
            store.load("2025-06-30")

    def test_snapshot_series_equals_rebuild_per_date(self, small_staging, tmp_path):
        """Team active counts read from stored snapshots match a fresh
        rebuild of the caseload for each date."""
        from caseview.caseload.build import build_caseload

        store = SnapshotStore(tmp_path)
        dates = [AS_OF - timedelta(days=2), AS_OF - timedelta(days=1), AS_OF]
        for day in dates:
            store.snapshot_caseload(build_caseload(small_staging, day, "key"), day)
        for day in dates:
            stored = store.load(day.isoformat())
            rebuilt = build_caseload(small_staging, day, "key")
            stored_counts: dict = {}
            for row in stored:
                if row["active"] and row["team"]:
                    stored_counts[row["team"]] = stored_counts.get(row["team"], 0) + 1
            rebuilt_counts: dict = {}
            for row in rebuilt:
                if row.active and row.team:
                    rebuilt_counts[row.team] = rebuilt_counts.get(row.team, 0) + 1
            assert stored_counts == rebuilt_counts
