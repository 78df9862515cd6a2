"""Unified caseload model: rows, snapshots, catalogues and rollups."""

from .build import (
    PatientBundle,
    build_caseload,
    build_row,
    bundle_patients,
    checklist_status,
    current_medications,
    read_caseload,
    write_caseload,
)
from .catalogues import CATALOGUE_KINDS, build_catalogues
from .complexity import ComplexityConfig, complexity_score
from .distribution import DistributionTable, UNASSIGNED, UnknownTeam, caseload_distribution
from .medication import MedicationItem, MedicationSummary, medication_summary
from .physical_health import (
    PhysicalHealthChecklist,
    monthly_completion_series,
    physical_health_status,
)
from .rows import CHECKLIST_MEASURES, CaseloadRow, Observation, age_band, duration_band
from .snapshots import CaseloadSnapshot, DuplicateSnapshot, SnapshotCorrupt, SnapshotStore

__all__ = [
    "CATALOGUE_KINDS",
    "CHECKLIST_MEASURES",
    "CaseloadRow",
    "CaseloadSnapshot",
    "ComplexityConfig",
    "DistributionTable",
    "DuplicateSnapshot",
    "MedicationItem",
    "MedicationSummary",
    "Observation",
    "PatientBundle",
    "PhysicalHealthChecklist",
    "SnapshotCorrupt",
    "SnapshotStore",
    "UNASSIGNED",
    "UnknownTeam",
    "age_band",
    "build_caseload",
    "build_catalogues",
    "build_row",
    "bundle_patients",
    "caseload_distribution",
    "checklist_status",
    "complexity_score",
    "current_medications",
    "duration_band",
    "medication_summary",
    "monthly_completion_series",
    "physical_health_status",
    "read_caseload",
    "write_caseload",
]
