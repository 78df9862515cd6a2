"""Template grammar for synthetic clinical notes.

Every fact sentence is rendered from a template whose polarity, temporality
and certainty are fixed metadata, so ground-truth labels come from the
grammar itself rather than from running the extractor over its own output.
Fact spans are tracked during rendering, byte-exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..extraction.measurements import match_lifestyle
from ..extraction.types import Entity

DOSES = ("5mg", "10mg", "15mg", "20mg", "25mg", "50mg", "100mg", "150mg", "200mg", "250mg", "500mg")


@dataclass(frozen=True)
class FactSpec:
    slot: str  # placeholder name; "" for fixed-phrase (lifestyle) facts
    kind: str  # "drug" | measurement kind | lifestyle kind
    polarity: str
    temporality: str
    certainty: str


@dataclass(frozen=True)
class SentenceTemplate:
    tid: str
    text: str
    facts: tuple[FactSpec, ...]
    category: str


def _t(tid: str, text: str, category: str, *facts: FactSpec) -> SentenceTemplate:
    return SentenceTemplate(tid=tid, text=text, facts=tuple(facts), category=category)


def _drug(slot: str, polarity: str, temporality: str, certainty: str = "confirmed") -> FactSpec:
    return FactSpec(slot=slot, kind="drug", polarity=polarity, temporality=temporality, certainty=certainty)


MED_CURRENT = (
    _t("C1", "Started {d} {dose} today.", "med_current", _drug("d", "affirmed", "present")),
    _t("C2", "Continues on {d} {dose} with good effect.", "med_current", _drug("d", "affirmed", "present")),
    _t("C3", "{d} {dose} prescribed at clinic today.", "med_current", _drug("d", "affirmed", "present")),
    _t("C4", "Remains on {d} at the same dose.", "med_current", _drug("d", "affirmed", "present")),
    _t("C5", "Currently taking {d} {dose}.", "med_current", _drug("d", "affirmed", "present")),
    _t("C6", "Still on {d}, adherence good.", "med_current", _drug("d", "affirmed", "present")),
    _t("C7", "Recommenced {d} {dose} this week.", "med_current", _drug("d", "affirmed", "present")),
    _t("C8", "Medication reviewed and {d} continued.", "med_current", _drug("d", "affirmed", "present")),
)

MED_NEGATED = (
    _t("N1", "No evidence of {d} use.", "med_negated", _drug("d", "negated", "present")),
    _t("N2", "Denies taking {d}.", "med_negated", _drug("d", "negated", "present")),
    _t("N3", "Not currently on {d}.", "med_negated", _drug("d", "negated", "present")),
    _t("N4", "{d} was declined by the patient.", "med_negated", _drug("d", "negated", "present")),
    _t("N5", "Not on {d} at present.", "med_negated", _drug("d", "negated", "present")),
    _t("N6", "Never prescribed {d}.", "med_negated", _drug("d", "negated", "present")),
    _t("N7", "No history of {d} use.", "med_negated", _drug("d", "negated", "present")),
)

MED_PAST = (
    _t("P1", "Previously trialled {d} with partial response.", "med_past", _drug("d", "affirmed", "past")),
    _t("P2", "History of {d} use in earlier episodes.", "med_past", _drug("d", "affirmed", "past")),
    _t("P3", "Stopped {d} last year due to side effects.", "med_past", _drug("d", "affirmed", "past")),
    _t("P4", "{d} was discontinued in 2019.", "med_past", _drug("d", "affirmed", "past")),
    _t("P5", "Was on {d} for two years before admission.", "med_past", _drug("d", "affirmed", "past")),
    _t("P6", "Used to take {d} regularly.", "med_past", _drug("d", "affirmed", "past")),
    _t("P7", "{d} was stopped after review.", "med_past", _drug("d", "affirmed", "past")),
    _t("P8", "Previously on {d}, tolerated poorly.", "med_past", _drug("d", "affirmed", "past")),
)

MED_FUTURE = (
    _t("U1", "Plan to start {d} next week.", "med_future", _drug("d", "affirmed", "future")),
    _t("U2", "Due to commence {d} at next review.", "med_future", _drug("d", "affirmed", "future")),
    _t("U3", "Will start {d} once bloods are back.", "med_future", _drug("d", "affirmed", "future")),
    _t("U4", "To be started on {d} at discharge.", "med_future", _drug("d", "affirmed", "future")),
    _t("U5", "Scheduled to start {d} next month.", "med_future", _drug("d", "affirmed", "future")),
)

MED_HYPOTHETICAL = (
    _t("H1", "Consider starting {d} if symptoms persist.", "med_hypothetical", _drug("d", "affirmed", "future", "hypothetical")),
    _t("H2", "Would consider {d} as an option.", "med_hypothetical", _drug("d", "affirmed", "present", "hypothetical")),
    _t("H3", "Discussed the option of {d} today.", "med_hypothetical", _drug("d", "affirmed", "present", "hypothetical")),
    _t("H4", "May benefit from {d} augmentation.", "med_hypothetical", _drug("d", "affirmed", "present", "hypothetical")),
    _t("H5", "{d} could be considered at next review.", "med_hypothetical", _drug("d", "affirmed", "future", "hypothetical")),
    _t("H6", "{d} remains an option if needed.", "med_hypothetical", _drug("d", "affirmed", "present", "hypothetical")),
)

MED_SWITCH = (
    _t("W1", "Previously on {d}, currently on {d2}.", "med_switch",
       _drug("d", "affirmed", "past"), _drug("d2", "affirmed", "present")),
    _t("W2", "Stopped {d} and started {d2} today.", "med_switch",
       _drug("d", "affirmed", "past"), _drug("d2", "affirmed", "present")),
)

# Measurement phrase patterns; the rendered phrase is exactly the span the
# measurement recognizer matches (verified by tests over the whole grammar).
MEASUREMENT_PATTERNS: dict[str, tuple[str, ...]] = {
    "bmi": ("BMI {v}", "BMI: {v}", "Body mass index is {v}"),
    "bmi_past": ("BMI was {v}",),
    "bp": ("BP {s}/{dia} mmHg", "BP {s}/{dia}", "Blood pressure was {s}/{dia}", "BP: {s}/{dia}"),
    "bp_past": ("BP was {s}/{dia}",),
    "hba1c": ("HbA1c {v} mmol/mol", "HbA1c was {v} mmol/mol", "HbA1c: {v} mmol/mol"),
    "hba1c_pct": ("HbA1c {v}%",),
    "glucose": ("Fasting glucose {v} mmol/L", "Glucose {v}", "Blood glucose {v} mmol/L"),
    "lipid": ("Total cholesterol {v} mmol/L", "Cholesterol was {v}"),
}

MEASUREMENT_ENTITY = {
    "bmi": Entity.BMI, "bmi_past": Entity.BMI,
    "bp": Entity.BLOOD_PRESSURE, "bp_past": Entity.BLOOD_PRESSURE,
    "hba1c": Entity.HBA1C, "hba1c_pct": Entity.HBA1C,
    "glucose": Entity.GLUCOSE, "lipid": Entity.LIPID_PROFILE,
}

MEASUREMENT_UNIT = {
    "bmi": "kg/m2", "bmi_past": "kg/m2",
    "bp": "mmHg", "bp_past": "mmHg",
    "hba1c": "mmol/mol", "hba1c_pct": "%",
    "glucose": "mmol/L", "lipid": "mmol/L",
}

MEASUREMENT_PRESENT = (
    _t("M1", "{m} recorded at clinic.", "measurement", FactSpec("m", "", "affirmed", "present", "confirmed")),
    _t("M2", "{m} today.", "measurement", FactSpec("m", "", "affirmed", "present", "confirmed")),
    _t("M3", "{m} at review.", "measurement", FactSpec("m", "", "affirmed", "present", "confirmed")),
    _t("M4", "{m} noted during assessment.", "measurement", FactSpec("m", "", "affirmed", "present", "confirmed")),
)
MEASUREMENT_PAST = (
    _t("M5", "Previous {m} last year.", "measurement_past", FactSpec("m", "", "affirmed", "past", "confirmed")),
)

LIFESTYLE = (
    _t("L1", "Reports being a current smoker.", "lifestyle", FactSpec("", "smoking_status", "affirmed", "present", "confirmed")),
    _t("L2", "Non-smoker.", "lifestyle", FactSpec("", "smoking_status", "negated", "present", "confirmed")),
    _t("L3", "Denies tobacco use.", "lifestyle", FactSpec("", "smoking_status", "negated", "present", "confirmed")),
    _t("L4", "Smoking around ten per day.", "lifestyle", FactSpec("", "smoking_status", "affirmed", "present", "confirmed")),
    _t("L14", "Ex-smoker, quit two years ago.", "lifestyle", FactSpec("", "smoking_status", "affirmed", "past", "confirmed")),
    _t("L5", "Alcohol intake within recommended limits.", "lifestyle", FactSpec("", "alcohol_use", "affirmed", "present", "confirmed")),
    _t("L6", "Denies alcohol use.", "lifestyle", FactSpec("", "alcohol_use", "negated", "present", "confirmed")),
    _t("L7", "Drinking socially at weekends.", "lifestyle", FactSpec("", "alcohol_use", "affirmed", "present", "confirmed")),
    _t("L8", "No alcohol intake reported.", "lifestyle", FactSpec("", "alcohol_use", "negated", "present", "confirmed")),
    _t("L9", "Diet remains balanced with regular meals.", "lifestyle", FactSpec("", "diet", "affirmed", "present", "confirmed")),
    _t("L10", "Eating habits irregular with frequent takeaways.", "lifestyle", FactSpec("", "diet", "affirmed", "present", "confirmed")),
    _t("L11", "Engages in regular exercise.", "lifestyle", FactSpec("", "physical_activity", "affirmed", "present", "confirmed")),
    _t("L12", "Physical activity limited at present.", "lifestyle", FactSpec("", "physical_activity", "affirmed", "present", "confirmed")),
    _t("L13", "No regular exercise currently.", "lifestyle", FactSpec("", "physical_activity", "negated", "present", "confirmed")),
)

FILLERS = (
    "Seen at home today with carer in attendance.",
    "Attended clinic accompanied by key worker.",
    "Mental state settled overall.",
    "Care plan reviewed and updated.",
    "Sleep variable over recent weeks.",
    "Mood reported as stable this week.",
    "Family meeting arranged for later this month.",
    "Risk assessment completed, nothing of concern.",
    "Housing situation settled for now.",
    "Engaging well with the care team.",
    "Benefits paperwork discussed and signposted.",
    "Will attend the weekly group session.",
    "Capacity assessed and documented.",
    "Awaiting allocation of support worker.",
)

OPENERS = (
    "Routine review at clinic.",
    "Home visit completed.",
    "Telephone consultation this morning.",
    "Ward round review.",
    "Joint review with the team.",
    "Planned follow-up appointment.",
)

CLOSERS = (
    "Follow-up arranged in two weeks.",
    "To be reviewed at the next planning meeting.",
    "GP copied into correspondence.",
    "Next appointment scheduled.",
    "Plan agreed with the patient.",
    "Team informed of the outcome.",
)

MED_TEMPLATES = {
    "med_current": MED_CURRENT,
    "med_negated": MED_NEGATED,
    "med_past": MED_PAST,
    "med_future": MED_FUTURE,
    "med_hypothetical": MED_HYPOTHETICAL,
}

ALL_FACT_TEMPLATES = (
    MED_CURRENT + MED_NEGATED + MED_PAST + MED_FUTURE + MED_HYPOTHETICAL + MED_SWITCH
    + MEASUREMENT_PRESENT + MEASUREMENT_PAST + LIFESTYLE
)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.1f}"


def sample_measurement(kind: str, rng: random.Random) -> tuple[str, tuple[float, ...]]:
    """(rendered phrase, values) for a measurement kind."""
    pattern = rng.choice(MEASUREMENT_PATTERNS[kind])
    if kind in ("bp", "bp_past"):
        sys_v = float(rng.randint(95, 180))
        dia_v = float(rng.randint(55, 110))
        return pattern.format(s=_fmt(sys_v), dia=_fmt(dia_v)), (sys_v, dia_v)
    if kind in ("bmi", "bmi_past"):
        v = round(rng.uniform(16.0, 42.0), 1)
    elif kind == "hba1c":
        v = float(rng.randint(28, 95))
    elif kind == "hba1c_pct":
        v = round(rng.uniform(4.5, 11.0), 1)
    elif kind == "glucose":
        v = round(rng.uniform(3.5, 14.0), 1)
    elif kind == "lipid":
        v = round(rng.uniform(2.8, 8.5), 1)
    else:
        raise ValueError(kind)
    return pattern.format(v=_fmt(v)), (v,)


@dataclass(frozen=True)
class RenderedFact:
    start: int  # offsets within the sentence
    end: int
    surface: str
    entity: Entity
    canonical: str
    values: tuple[float, ...] | None
    unit: str | None
    polarity: str
    temporality: str
    certainty: str


def render_sentence(
    template: SentenceTemplate,
    slot_values: dict[str, str],
    slot_meta: dict[str, tuple[Entity, str, tuple[float, ...] | None, str | None]],
) -> tuple[str, list[RenderedFact]]:
    """Fill a template, tracking the char span of every fact surface.

    slot_values maps slot name -> surface text; slot_meta maps slot name ->
    (entity, canonical, values, unit). Fixed-phrase facts (slot "") locate
    their phrase via the lifestyle matcher at definition time.
    """
    out: list[str] = []
    spans: dict[str, tuple[int, int]] = {}
    pos = 0
    i = 0
    text = template.text
    while i < len(text):
        if text[i] == "{":
            j = text.index("}", i)
            slot = text[i + 1: j]
            value = slot_values[slot]
            if i == 0:
                value = value[0].upper() + value[1:]
            spans[slot] = (pos, pos + len(value))
            out.append(value)
            pos += len(value)
            i = j + 1
        else:
            out.append(text[i])
            pos += 1
            i += 1
    sentence = "".join(out)

    facts: list[RenderedFact] = []
    for spec in template.facts:
        if spec.slot:
            start, end = spans[spec.slot]
            entity, canonical, values, unit = slot_meta[spec.slot]
        else:
            matches = match_lifestyle(sentence)
            if len(matches) != 1:
                raise ValueError(f"template {template.tid} must contain exactly one lifestyle phrase")
            m = matches[0]
            start, end = m.start, m.end
            entity, canonical = Entity(spec.kind), spec.kind
            values, unit = None, None
        facts.append(
            RenderedFact(
                start=start,
                end=end,
                surface=sentence[start:end],
                entity=entity,
                canonical=canonical,
                values=values,
                unit=unit,
                polarity=spec.polarity,
                temporality=spec.temporality,
                certainty=spec.certainty,
            )
        )
    return sentence, facts
