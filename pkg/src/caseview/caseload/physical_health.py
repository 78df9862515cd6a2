"""Physical-health checklist rollups and the monthly completion series."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

from .build import PatientBundle, checklist_status
from .rows import CHECKLIST_MEASURES


@dataclass
class PhysicalHealthChecklist:
    patient_id: str
    as_of: str
    measures: dict[str, dict]  # measure -> {status, last_date, source}

    @property
    def complete_count(self) -> int:
        return sum(1 for m in self.measures.values() if m["status"] == "complete")

    def to_json(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "as_of": self.as_of,
            "measures": self.measures,
            "complete_count": self.complete_count,
        }


def physical_health_status(bundle: PatientBundle, as_of: date) -> PhysicalHealthChecklist:
    """Each measure complete iff a qualifying observation (structured, or an
    affirmed/present/confirmed mention) exists in the trailing 12 months."""
    return PhysicalHealthChecklist(
        patient_id=bundle.patient_id,
        as_of=as_of.isoformat(),
        measures=checklist_status(bundle, as_of),
    )


def _month_ends(from_month: date, to_month: date) -> list[date]:
    """Last day of each calendar month in [from_month, to_month]."""
    out = []
    cursor = from_month.replace(day=1)
    stop = to_month.replace(day=1)
    while cursor <= stop:
        nxt = (cursor.replace(day=28) + timedelta(days=4)).replace(day=1)
        out.append(nxt - timedelta(days=1))
        cursor = nxt
    return out


def monthly_completion_series(
    bundles: dict[str, PatientBundle],
    patient_ids: list[str],
    from_month: date,
    to_month: date,
) -> list[dict]:
    """Per-month observation counts and completion rates for a patient set.

    For each calendar month: how many qualifying observations were recorded
    that month (per measure), and what fraction of the patient set had each
    measure complete at month end.
    """
    series = []
    n = len(patient_ids)
    for month_end in _month_ends(from_month, to_month):
        month_start = month_end.replace(day=1).isoformat()
        recorded = {m: 0 for m in CHECKLIST_MEASURES}
        complete = {m: 0 for m in CHECKLIST_MEASURES}
        for pid in patient_ids:
            bundle = bundles.get(pid)
            if bundle is None:
                continue
            for obs in bundle.observations():
                obs_day = obs.when[:10]
                if obs.counts_for_check and month_start <= obs_day <= month_end.isoformat():
                    recorded[obs.measure] += 1
            status = checklist_status(bundle, month_end)
            for measure in CHECKLIST_MEASURES:
                if status[measure]["status"] == "complete":
                    complete[measure] += 1
        series.append(
            {
                "month": month_start[:7],
                "patients": n,
                "observations_recorded": recorded,
                "measures_completed_total": sum(recorded.values()),
                "completion_rate": {
                    m: (complete[m] / n if n else 0.0) for m in CHECKLIST_MEASURES
                },
            }
        )
    return series
