"""Domain types for clinical text extraction."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class Entity(str, Enum):
    MEDICATION = "medication"
    BMI = "BMI"
    BLOOD_PRESSURE = "blood_pressure"
    HBA1C = "HbA1c"
    GLUCOSE = "glucose"
    LIPID_PROFILE = "lipid_profile"
    SMOKING_STATUS = "smoking_status"
    ALCOHOL_USE = "alcohol_use"
    DIET = "diet"
    PHYSICAL_ACTIVITY = "physical_activity"


MEASUREMENT_ENTITIES = frozenset(
    {Entity.BMI, Entity.BLOOD_PRESSURE, Entity.HBA1C, Entity.GLUCOSE, Entity.LIPID_PROFILE}
)

LIFESTYLE_ENTITIES = frozenset(
    {Entity.SMOKING_STATUS, Entity.ALCOHOL_USE, Entity.DIET, Entity.PHYSICAL_ACTIVITY}
)


class Polarity(str, Enum):
    AFFIRMED = "affirmed"
    NEGATED = "negated"


class Temporality(str, Enum):
    PAST = "past"
    PRESENT = "present"
    FUTURE = "future"


class Certainty(str, Enum):
    CONFIRMED = "confirmed"
    HYPOTHETICAL = "hypothetical"


@dataclass(frozen=True)
class MeasurementValue:
    """Numeric payload of a measurement mention (e.g. (120, 80) mmHg)."""

    values: tuple[float, ...]
    unit: str

    def to_json(self) -> dict[str, Any]:
        return {"values": list(self.values), "unit": self.unit}

    @classmethod
    def from_json(cls, obj: dict[str, Any] | None) -> "MeasurementValue | None":
        if obj is None:
            return None
        return cls(values=tuple(float(v) for v in obj["values"]), unit=obj["unit"])


@dataclass(frozen=True)
class Mention:
    """One extracted fact with provenance.

    The span is [start, end) in the source document; snippet carries the
    span text plus up to 40 characters of context on each side.
    """

    doc_id: str
    start: int
    end: int
    entity: Entity
    canonical: str
    value: MeasurementValue | None
    polarity: Polarity
    temporality: Temporality
    certainty: Certainty
    snippet: str

    def to_record(self) -> dict[str, Any]:
        # Fixed key order keeps the JSONL output bit-stable.
        return {
            "doc_id": self.doc_id,
            "start": self.start,
            "end": self.end,
            "entity": self.entity.value,
            "canonical": self.canonical,
            "value": self.value.to_json() if self.value else None,
            "polarity": self.polarity.value,
            "temporality": self.temporality.value,
            "certainty": self.certainty.value,
            "snippet": self.snippet,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "Mention":
        return cls(
            doc_id=rec["doc_id"],
            start=rec["start"],
            end=rec["end"],
            entity=Entity(rec["entity"]),
            canonical=rec["canonical"],
            value=MeasurementValue.from_json(rec.get("value")),
            polarity=Polarity(rec["polarity"]),
            temporality=Temporality(rec["temporality"]),
            certainty=Certainty(rec["certainty"]),
            snippet=rec["snippet"],
        )


@dataclass(frozen=True)
class FlaggedValue:
    """A recognized measurement outside plausibility bounds. Kept in a side
    channel instead of being emitted as a Mention."""

    doc_id: str
    start: int
    end: int
    entity: Entity
    values: tuple[float, ...]
    unit: str
    reason: str

    def to_record(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "start": self.start,
            "end": self.end,
            "entity": self.entity.value,
            "values": list(self.values),
            "unit": self.unit,
            "reason": self.reason,
        }
