"""Declarative dashboard specs: loading, linting, catalog projection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..gov.policy import Policy
from .index_schemas import INDEX_SCHEMAS

CATEGORIES = ("population_health", "clinical_pathways", "caseload_management", "patient_chart")
VIZ_TYPES = ("table", "bar", "line", "map_choropleth_by_borough", "histogram", "stat")


class DashboardError(ValueError):
    pass


@dataclass(frozen=True)
class FilterSlot:
    name: str
    field: str
    type: str
    required: bool = False


@dataclass(frozen=True)
class PanelSpec:
    id: str
    title: str
    viz: str
    index: str
    query: dict
    agg: dict | None
    filter_slots: tuple[str, ...]
    columns: tuple[str, ...]
    time_field: str | None
    drilldown: dict | None


@dataclass(frozen=True)
class DashboardSpec:
    id: str
    category: str
    title: str
    description: str
    filter_schema: tuple[FilterSlot, ...]
    panels: tuple[PanelSpec, ...]

    def slot(self, name: str) -> FilterSlot | None:
        for s in self.filter_schema:
            if s.name == name:
                return s
        return None

    def panel(self, panel_id: str) -> PanelSpec | None:
        for p in self.panels:
            if p.id == panel_id:
                return p
        return None

    def indices(self) -> set[str]:
        return {p.index for p in self.panels}

    def to_catalog_entry(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "title": self.title,
            "description": self.description,
            "filter_schema": [
                {"name": s.name, "field": s.field, "type": s.type, "required": s.required}
                for s in self.filter_schema
            ],
            "panels": [
                {
                    "id": p.id, "title": p.title, "viz": p.viz, "index": p.index,
                    "filter_slots": list(p.filter_slots), "columns": list(p.columns),
                    "drilldown": p.drilldown,
                }
                for p in self.panels
            ],
        }


def _parse_dashboard(obj: dict) -> DashboardSpec:
    return DashboardSpec(
        id=obj["id"],
        category=obj["category"],
        title=obj["title"],
        description=obj.get("description", ""),
        filter_schema=tuple(
            FilterSlot(
                name=s["name"], field=s["field"], type=s.get("type", "keyword"),
                required=bool(s.get("required", False)),
            )
            for s in obj.get("filter_schema", ())
        ),
        panels=tuple(
            PanelSpec(
                id=p["id"],
                title=p.get("title", p["id"]),
                viz=p["viz"],
                index=p["index"],
                query=p.get("query", {}),
                agg=p.get("agg") if p.get("agg") else None,
                filter_slots=tuple(p.get("filter_slots", ())),
                columns=tuple(p.get("columns", ())),
                time_field=p.get("time_field"),
                drilldown=p.get("drilldown"),
            )
            for p in obj.get("panels", ())
        ),
    )


def load_dashboards(directory: str | Path | None = None) -> dict[str, DashboardSpec]:
    """Load specs from a directory, or the bundled defaults."""
    specs: dict[str, DashboardSpec] = {}
    if directory is None:
        root = resources.files("caseview.data").joinpath("dashboards")
        files = sorted(root.iterdir(), key=lambda f: f.name)
        for f in files:
            if f.name.endswith(".json"):
                spec = _parse_dashboard(json.loads(f.read_text()))
                specs[spec.id] = spec
    else:
        for path in sorted(Path(directory).glob("*.json")):
            spec = _parse_dashboard(json.loads(path.read_text()))
            specs[spec.id] = spec
    return specs


def lint_dashboards(specs: dict[str, DashboardSpec]) -> list[str]:
    """Static checks: categories, viz types, index/field references,
    filter-slot typing, drilldown targets. Returns a list of problems."""
    problems: list[str] = []
    for spec in specs.values():
        where = f"dashboard {spec.id}"
        if spec.category not in CATEGORIES:
            problems.append(f"{where}: bad category {spec.category!r}")
        slot_names = {s.name for s in spec.filter_schema}
        for slot in spec.filter_schema:
            pass
        for panel in spec.panels:
            pwhere = f"{where} panel {panel.id}"
            if panel.viz not in VIZ_TYPES:
                problems.append(f"{pwhere}: bad viz {panel.viz!r}")
            schema = INDEX_SCHEMAS.get(panel.index)
            if schema is None:
                problems.append(f"{pwhere}: unknown index {panel.index!r}")
                continue
            for flt in panel.query.get("filters", ()):
                if flt.get("field") not in schema:
                    problems.append(f"{pwhere}: filter field {flt.get('field')!r} not in {panel.index}")
            for s in panel.query.get("sort", ()):
                if s.get("field") not in ("_score", "_key") and s.get("field") not in schema:
                    problems.append(f"{pwhere}: sort field {s.get('field')!r} not in {panel.index}")
            if panel.agg:
                for f in panel.agg.get("group_by", ()):
                    if f not in schema:
                        problems.append(f"{pwhere}: group_by field {f!r} not in {panel.index}")
                hist = panel.agg.get("date_histogram")
                if hist and schema.get(hist.get("field")) != "date":
                    problems.append(f"{pwhere}: histogram field {hist.get('field')!r} not a date")
                metric = panel.agg.get("metric", {})
                if metric.get("kind", "count") != "count" and schema.get(metric.get("field")) != "numeric":
                    problems.append(f"{pwhere}: metric field {metric.get('field')!r} not numeric")
            for col in panel.columns:
                if col not in schema:
                    problems.append(f"{pwhere}: column {col!r} not in {panel.index}")
            for slot_name in panel.filter_slots:
                if slot_name not in slot_names:
                    problems.append(f"{pwhere}: unknown filter slot {slot_name!r}")
                else:
                    slot = spec.slot(slot_name)
                    if slot.field not in schema:
                        problems.append(
                            f"{pwhere}: slot {slot_name!r} field {slot.field!r} not in {panel.index}"
                        )
            if panel.time_field and schema.get(panel.time_field) != "date":
                problems.append(f"{pwhere}: time_field {panel.time_field!r} not a date")
            if panel.drilldown:
                target = panel.drilldown.get("target")
                if target and target not in specs:
                    problems.append(f"{pwhere}: drilldown target {target!r} not a dashboard")
    return problems


def catalog_for_role(specs: dict[str, DashboardSpec], policy: Policy, role: str) -> dict:
    """Catalog grouped by category, reduced to dashboards the role can use.

    A dashboard is visible iff every panel index is granted and no required
    filter slot touches a field the role may not query. This keeps the
    non-clinical catalog a subset of the clinical one by construction.
    """
    role_policy = policy.role(role)
    blocked = role_policy.non_pass_fields()
    grouped: dict[str, list[dict]] = {c: [] for c in CATEGORIES}
    for spec_id in sorted(specs):
        spec = specs[spec_id]
        if not spec.indices() <= role_policy.indices:
            continue
        if any(s.required and s.field in blocked for s in spec.filter_schema):
            continue
        grouped[spec.category].append(spec.to_catalog_entry())
    return grouped
