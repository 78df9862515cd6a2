"""Distribution validation of a generated store against census targets."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import demographics
from .store import SourceStore


class EmptyStore(ValueError):
    pass


@dataclass
class CategoryCheck:
    attribute: str
    category: str
    observed_count: int
    observed_pct: float
    target_pct: float

    @property
    def abs_deviation_pp(self) -> float:
        return abs(self.observed_pct - self.target_pct)

    def to_json(self) -> dict:
        return {
            "attribute": self.attribute,
            "category": self.category,
            "observed_count": self.observed_count,
            "observed_pct": round(self.observed_pct, 3),
            "target_pct": self.target_pct,
            "abs_deviation_pp": round(self.abs_deviation_pp, 3),
        }


@dataclass
class DistributionReport:
    n: int
    checks: list[CategoryCheck] = field(default_factory=list)

    @property
    def max_deviation_pp(self) -> float:
        return max(c.abs_deviation_pp for c in self.checks)

    def within(self, tolerance_pp: float) -> bool:
        return self.max_deviation_pp <= tolerance_pp

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "max_deviation_pp": round(self.max_deviation_pp, 3),
            "checks": [c.to_json() for c in self.checks],
        }


def validate_distributions(store: SourceStore) -> DistributionReport:
    """Compare observed cohort marginals with the published targets.

    Counts are recomputed by a direct linear pass over patients and
    diagnosis events, independent of how generation allocated them.
    """
    patients = list(store.iter_patients())
    n = len(patients)
    if n == 0:
        raise EmptyStore("store has no patients")

    report = DistributionReport(n=n)
    active_count = sum(1 for p in patients if p.active)
    counters = {
        "active": Counter({"active": active_count, "inactive": n - active_count}),
        "gender": Counter(p.gender for p in patients),
        "ethnicity": Counter(p.ethnicity for p in patients),
        "borough": Counter(p.borough for p in patients),
    }

    chapter_by_patient: dict[str, str] = {}
    for event in store.iter_events():
        if event.kind == "diagnosis" and event.patient_id is not None:
            chapter_by_patient[event.patient_id] = event.payload.get("chapter", "none")
    diagnosis_counter: Counter = Counter(
        chapter_by_patient.get(p.patient_id, "none") for p in patients
    )
    counters["diagnosis"] = diagnosis_counter

    for attribute, targets in demographics.OVERALL_PCT.items():
        observed = counters[attribute]
        for category, target_pct in targets.items():
            count = observed.get(category, 0)
            report.checks.append(
                CategoryCheck(
                    attribute=attribute,
                    category=category,
                    observed_count=count,
                    observed_pct=100.0 * count / n,
                    target_pct=target_pct,
                )
            )
    return report
