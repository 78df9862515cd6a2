"""HTTP service layer: FastAPI app, sessions, dashboards, panel execution."""

from .app import create_app
from .auth import InvalidCredential, InvalidToken, SessionStore, SessionToken
from .chart import ChartUnauthorized, UnknownPatient, patient_chart
from .dashboards import (
    CATEGORIES,
    DashboardSpec,
    FilterSlot,
    PanelSpec,
    VIZ_TYPES,
    catalog_for_role,
    lint_dashboards,
    load_dashboards,
)
from .panels import MalformedFilter, PanelRequest, PanelUnauthorized, panel_data, render_deep_link
from .state import AppState

__all__ = [
    "AppState",
    "CATEGORIES",
    "ChartUnauthorized",
    "DashboardSpec",
    "FilterSlot",
    "InvalidCredential",
    "InvalidToken",
    "MalformedFilter",
    "PanelRequest",
    "PanelSpec",
    "PanelUnauthorized",
    "SessionStore",
    "SessionToken",
    "UnknownPatient",
    "VIZ_TYPES",
    "catalog_for_role",
    "create_app",
    "lint_dashboards",
    "load_dashboards",
    "panel_data",
    "patient_chart",
    "render_deep_link",
]
