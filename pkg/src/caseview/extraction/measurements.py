"""Measurement and lifestyle-status recognition in note text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .matcher import PhraseMatcher
from .segment import Token
from .types import Entity

# Plausibility bounds per (entity, unit). Values outside are flagged, not
# emitted. Bounds are an implementation decision, not clinical guidance.
PLAUSIBILITY_BOUNDS: dict[tuple[Entity, str], tuple[float, float]] = {
    (Entity.BMI, "kg/m2"): (10.0, 80.0),
    (Entity.HBA1C, "mmol/mol"): (15.0, 200.0),
    (Entity.HBA1C, "%"): (3.0, 20.0),
    (Entity.GLUCOSE, "mmol/L"): (1.0, 40.0),
    (Entity.LIPID_PROFILE, "mmol/L"): (0.5, 20.0),
}
BP_SYSTOLIC_BOUNDS = (60.0, 260.0)
BP_DIASTOLIC_BOUNDS = (30.0, 160.0)

_CONNECT = r"(?:\s+(?:measured at|recorded at|checked at|was|is|of|at|today|now|currently))?\s*[:=]?\s*"
_NUM = r"\d{1,3}(?:\.\d+)?"

_BMI_RE = re.compile(rf"\b(?:BMI|body mass index){_CONNECT}({_NUM})", re.IGNORECASE)
_BP_RE = re.compile(
    rf"\b(?:BP|blood pressure){_CONNECT}(\d{{2,3}})\s*/\s*(\d{{2,3}})(?:\s*mmHg)?",
    re.IGNORECASE,
)
_HBA1C_RE = re.compile(rf"\bHbA1c{_CONNECT}({_NUM})(?:\s*(mmol/mol|%))?", re.IGNORECASE)
_GLUCOSE_RE = re.compile(
    rf"\b(?:fasting\s+)?(?:blood\s+)?glucose{_CONNECT}({_NUM})(?:\s*mmol/L)?",
    re.IGNORECASE,
)
_LIPID_RE = re.compile(
    rf"\b(?:total\s+)?cholesterol{_CONNECT}({_NUM})(?:\s*mmol/L)?",
    re.IGNORECASE,
)

LIFESTYLE_PHRASES: dict[Entity, tuple[str, ...]] = {
    Entity.SMOKING_STATUS: ("smoker", "smokes", "smoking", "smoked", "smoke", "cigarettes", "tobacco"),
    Entity.ALCOHOL_USE: ("alcohol use", "alcohol intake", "alcohol", "drinking"),
    Entity.DIET: ("diet", "dietary intake", "eating habits"),
    Entity.PHYSICAL_ACTIVITY: ("physical activity", "exercise", "exercises", "exercising"),
}

_lifestyle_matcher = PhraseMatcher(
    {phrase: entity.value for entity, phrases in LIFESTYLE_PHRASES.items() for phrase in phrases}
)


@dataclass(frozen=True)
class RawMeasurement:
    start: int
    end: int
    entity: Entity
    values: tuple[float, ...]
    unit: str
    plausible: bool
    reason: str = ""


def _bounded(entity: Entity, unit: str, value: float) -> tuple[bool, str]:
    lo, hi = PLAUSIBILITY_BOUNDS[(entity, unit)]
    if lo <= value <= hi:
        return True, ""
    return False, f"{entity.value} {value} {unit} outside [{lo}, {hi}]"


def parse_measurement(text: str) -> list[RawMeasurement]:
    """Recognize measurement expressions in a sentence.

    Returns every recognized pattern; implausible values carry
    plausible=False so callers can divert them to the flag channel.
    """
    out: list[RawMeasurement] = []
    for m in _BMI_RE.finditer(text):
        v = float(m.group(1))
        ok, why = _bounded(Entity.BMI, "kg/m2", v)
        out.append(RawMeasurement(m.start(), m.end(), Entity.BMI, (v,), "kg/m2", ok, why))
    for m in _BP_RE.finditer(text):
        sys_v, dia_v = float(m.group(1)), float(m.group(2))
        ok = BP_SYSTOLIC_BOUNDS[0] <= sys_v <= BP_SYSTOLIC_BOUNDS[1] and (
            BP_DIASTOLIC_BOUNDS[0] <= dia_v <= BP_DIASTOLIC_BOUNDS[1]
        )
        why = "" if ok else f"blood_pressure {sys_v}/{dia_v} outside plausible range"
        out.append(
            RawMeasurement(m.start(), m.end(), Entity.BLOOD_PRESSURE, (sys_v, dia_v), "mmHg", ok, why)
        )
    for m in _HBA1C_RE.finditer(text):
        v = float(m.group(1))
        unit = m.group(2) or "mmol/mol"  # IFCC units assumed when unstated
        ok, why = _bounded(Entity.HBA1C, unit, v)
        out.append(RawMeasurement(m.start(), m.end(), Entity.HBA1C, (v,), unit, ok, why))
    for m in _GLUCOSE_RE.finditer(text):
        v = float(m.group(1))
        ok, why = _bounded(Entity.GLUCOSE, "mmol/L", v)
        out.append(RawMeasurement(m.start(), m.end(), Entity.GLUCOSE, (v,), "mmol/L", ok, why))
    for m in _LIPID_RE.finditer(text):
        v = float(m.group(1))
        ok, why = _bounded(Entity.LIPID_PROFILE, "mmol/L", v)
        out.append(RawMeasurement(m.start(), m.end(), Entity.LIPID_PROFILE, (v,), "mmol/L", ok, why))
    out.sort(key=lambda r: r.start)
    return out


def match_lifestyle(text: str, tokens: list[Token] | None = None):
    """Lifestyle-status phrase matches; canonical is the entity name."""
    return _lifestyle_matcher.find(text, tokens)
