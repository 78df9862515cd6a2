"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class LoginRequest(BaseModel):
    username: str
    password: str


class LoginResponse(BaseModel):
    token: str
    user: str
    role: str
    expires_at: float


class ErrorBody(BaseModel):
    code: str
    message: str
    audit_id: Optional[str] = None


class PanelDataRequest(BaseModel):
    filters: dict[str, Any] = Field(default_factory=dict)
    time_range: Optional[dict[str, str]] = None
    # clinical sessions may ask for the de-identified rendering; the server
    # then authorizes and masks as non_clinical (strictly narrower)
    view: Optional[str] = None


class PanelDataResponse(BaseModel):
    dashboard: str
    panel: str
    title: str
    viz: str
    columns: list[str] = Field(default_factory=list)
    rows: Optional[list[dict[str, Any]]] = None
    buckets: Optional[list[dict[str, Any]]] = None
    highlights: Optional[dict[str, list[str]]] = None
    stat: Optional[float] = None
    total: int = 0
    drilldown: Optional[dict[str, Any]] = None
    audit_id: str


class DashboardCatalogResponse(BaseModel):
    categories: dict[str, list[dict[str, Any]]]
    role: str


class ChartResponse(BaseModel):
    patient: dict[str, Any]
    checklist: dict[str, Any]
    medication_summary: dict[str, Any]
    catalogues: dict[str, list[dict[str, Any]]]
    deep_link: Optional[str] = None
    patient_ref: Optional[str] = None
    audit_id: str


class AuditStatsResponse(BaseModel):
    interval: str
    series: list[dict[str, Any]]
    audit_id: str


class PipelineRunRequest(BaseModel):
    as_of: str


class PipelineRunResponse(BaseModel):
    summary: dict[str, Any]
