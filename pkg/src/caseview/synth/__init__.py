"""Synthetic EHR source: deterministic cohort generator and store."""

from .demographics import ACTIVE_FRACTION, OVERALL_PCT, quota_assignment, quota_counts
from .generator import (
    GENERATION_DATE,
    CohortResult,
    MedTruth,
    NotePlan,
    PatientProfile,
    build_profile,
    generate_cohort,
    generate_notes,
    load_labels,
    plan_notes,
)
from .records import LabelRecord, PatientRecord, SourceDocument, SourceEvent
from .store import SchemaMismatch, SourceStore, StoreError
from .validate import DistributionReport, EmptyStore, validate_distributions

__all__ = [
    "ACTIVE_FRACTION",
    "CohortResult",
    "DistributionReport",
    "EmptyStore",
    "GENERATION_DATE",
    "LabelRecord",
    "MedTruth",
    "NotePlan",
    "OVERALL_PCT",
    "PatientProfile",
    "PatientRecord",
    "SchemaMismatch",
    "SourceDocument",
    "SourceEvent",
    "SourceStore",
    "StoreError",
    "build_profile",
    "generate_cohort",
    "generate_notes",
    "load_labels",
    "plan_notes",
    "quota_assignment",
    "quota_counts",
    "validate_distributions",
]
