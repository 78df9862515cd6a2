"""Incremental ETL from the source store into staged conceptual entities."""

from .linkage import LinkageReport, link_records
from .staging import (
    ENTITY_CLASSES,
    QuarantineRecord,
    StagingEntity,
    StagingError,
    StagingStore,
)
from .sync import CursorRegression, DeltaReport, append_run_log, replay, run_daily_sync
from .transform import (
    TransformOutcome,
    UNIT_TARGETS,
    event_to_entity,
    hba1c_pct_to_mmol,
    mention_to_entity,
    patient_to_entity,
    transform_to_entities,
)

__all__ = [
    "CursorRegression",
    "DeltaReport",
    "ENTITY_CLASSES",
    "LinkageReport",
    "QuarantineRecord",
    "StagingEntity",
    "StagingError",
    "StagingStore",
    "TransformOutcome",
    "UNIT_TARGETS",
    "append_run_log",
    "event_to_entity",
    "hba1c_pct_to_mmol",
    "link_records",
    "mention_to_entity",
    "patient_to_entity",
    "replay",
    "run_daily_sync",
    "transform_to_entities",
]
