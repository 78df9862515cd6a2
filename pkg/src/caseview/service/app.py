"""HTTP facade: versioned JSON API over the governed core."""

from __future__ import annotations

from datetime import date
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import pipeline as pipeline_mod
from ..gov.audit import AuditEvent, AuditUnavailable, audit_stats
from ..gov.authorize import authorize
from ..search.engine import ShardUnavailable
from .auth import InvalidCredential, InvalidToken
from .chart import ChartUnauthorized, UnknownPatient, patient_chart
from .dashboards import catalog_for_role
from .panels import MalformedFilter, PanelRequest, PanelUnauthorized, panel_data
from .schemas import (
    AuditStatsResponse,
    ChartResponse,
    DashboardCatalogResponse,
    ErrorBody,
    LoginRequest,
    LoginResponse,
    PanelDataRequest,
    PanelDataResponse,
    PipelineRunRequest,
    PipelineRunResponse,
)
from .state import AppState


def _error(status: int, code: str, message: str, audit_id: str | None = None) -> HTTPException:
    return HTTPException(
        status_code=status,
        detail=ErrorBody(code=code, message=message, audit_id=audit_id).model_dump(),
    )


def create_app(state: AppState, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="caseview", version="1.0")
    app.state.appstate = state

    def session_dep(authorization: str | None = Header(default=None)):
        if authorization and authorization.lower().startswith("bearer "):
            bearer = authorization[7:].strip()
        else:
            bearer = None
        try:
            return state.sessions.resolve(bearer)
        except InvalidToken as exc:
            raise _error(401, "unauthorized", str(exc))

    @app.exception_handler(AuditUnavailable)
    async def _audit_unavailable(_req: Request, exc: AuditUnavailable):
        # write-ahead contract: if the audit log cannot take the event, the
        # data request fails rather than going unrecorded
        return JSONResponse(
            status_code=503,
            content=ErrorBody(code="audit_unavailable", message=str(exc)).model_dump(),
        )

    @app.post("/v1/login", response_model=LoginResponse)
    def login(body: LoginRequest):
        try:
            session = state.sessions.login(body.username, body.password)
        except InvalidCredential:
            state.audit.append(AuditEvent(
                user=body.username, role="-", action="login", index="-",
                query_hash="-", result_count=0, decision="denied", reason="invalid_credential",
            ))
            raise _error(401, "invalid_credential", "bad username or password")
        state.audit.append(AuditEvent(
            user=session.user, role=session.role, action="login", index="-",
            query_hash="-", result_count=0, decision="allowed",
        ))
        return LoginResponse(
            token=session.token, user=session.user, role=session.role,
            expires_at=session.expires_at,
        )

    @app.get("/v1/dashboards", response_model=DashboardCatalogResponse)
    def list_dashboards(session=Depends(session_dep)):
        catalog = catalog_for_role(state.dashboards, state.policy, session.role)
        return DashboardCatalogResponse(categories=catalog, role=session.role)

    @app.post("/v1/dashboards/{dashboard_id}/panels/{panel_id}/data",
              response_model=PanelDataResponse, response_model_exclude_none=True)
    def get_panel_data(dashboard_id: str, panel_id: str, body: PanelDataRequest,
                       session=Depends(session_dep)):
        dashboard = state.dashboards.get(dashboard_id)
        if dashboard is None:
            raise _error(404, "unknown_dashboard", dashboard_id)
        panel = dashboard.panel(panel_id)
        if panel is None:
            raise _error(404, "unknown_panel", panel_id)
        req = PanelRequest(dashboard=dashboard, panel=panel,
                           filters=body.filters, time_range=body.time_range,
                           view=body.view)
        try:
            payload = panel_data(state, session, req)
        except MalformedFilter as exc:
            raise _error(400, "malformed_filter", str(exc))
        except PanelUnauthorized as exc:
            raise _error(403, "unauthorized", exc.reason, audit_id=exc.audit_id)
        except ShardUnavailable as exc:
            raise _error(503, "shard_unavailable", str(exc))
        return PanelDataResponse(**payload)

    @app.get("/v1/patients/{patient_ref}/chart", response_model=ChartResponse,
             response_model_exclude_none=True)
    def get_chart(patient_ref: str, session=Depends(session_dep)):
        try:
            payload = patient_chart(state, session, patient_ref)
        except ChartUnauthorized as exc:
            raise _error(403, "unauthorized", exc.reason, audit_id=exc.audit_id)
        except UnknownPatient:
            raise _error(404, "unknown_patient", patient_ref)
        return ChartResponse(**payload)

    @app.get("/v1/audit/stats", response_model=AuditStatsResponse)
    def get_audit_stats(start: str, end: str, interval: str = "week",
                        session=Depends(session_dep)):
        decision = authorize(session.role, "audit", state.policy)
        if decision.denied:
            audit_id = state.audit.append(AuditEvent(
                user=session.user, role=session.role, action="query", index="audit",
                query_hash="stats", result_count=0, decision="denied", reason=decision.reason,
            ))
            raise _error(403, "unauthorized", decision.reason, audit_id=audit_id)
        try:
            series = audit_stats(state.audit.records(), start, end, interval)
        except ValueError as exc:
            raise _error(400, "malformed_filter", str(exc))
        audit_id = state.audit.append(AuditEvent(
            user=session.user, role=session.role, action="query", index="audit",
            query_hash="stats", result_count=len(series), decision="allowed",
        ))
        return AuditStatsResponse(interval=interval, series=series, audit_id=audit_id)

    def _admin_guard(session):
        if session.role != "clinical":
            raise _error(403, "unauthorized", "pipeline administration requires the clinical role")
        if not state.admin_lock.acquire(blocking=False):
            raise _error(409, "pipeline_busy", "another pipeline operation is running")

    @app.post("/v1/admin/pipeline/run-all", response_model=PipelineRunResponse)
    def admin_run_all(body: PipelineRunRequest, session=Depends(session_dep)):
        _admin_guard(session)
        try:
            summary = pipeline_mod.run_all(state.config, date.fromisoformat(body.as_of),
                                           engine=state.engine)
            state.invalidate_model_caches()
        finally:
            state.admin_lock.release()
        return PipelineRunResponse(summary=summary)

    @app.post("/v1/admin/pipeline/sync", response_model=PipelineRunResponse)
    def admin_sync(body: PipelineRunRequest, session=Depends(session_dep)):
        from ..etl.sync import append_run_log, run_daily_sync
        from ..etl.staging import StagingStore
        from ..synth.store import SourceStore

        _admin_guard(session)
        try:
            source = SourceStore.open(state.config.source)
            staging = StagingStore.open(state.config.staging)
            report = run_daily_sync(source, staging, date.fromisoformat(body.as_of))
            append_run_log(state.config.etl_runs, report)
            source.close()
            staging.close()
            state.invalidate_model_caches()
        finally:
            state.admin_lock.release()
        return PipelineRunResponse(summary={"sync": report.to_json()})

    @app.post("/v1/admin/pipeline/build", response_model=PipelineRunResponse)
    def admin_build(body: PipelineRunRequest, session=Depends(session_dep)):
        from pathlib import Path

        from ..caseload.build import build_caseload, write_caseload
        from ..etl.staging import StagingStore

        _admin_guard(session)
        try:
            staging = StagingStore.open(state.config.staging)
            rows = build_caseload(staging, date.fromisoformat(body.as_of),
                                  state.config.deployment_key, state.complexity_config)
            path = Path(state.config.model_dir) / f"caseload-{body.as_of}.jsonl"
            digest = write_caseload(rows, path)
            staging.close()
        finally:
            state.admin_lock.release()
        return PipelineRunResponse(summary={"caseload": {"rows": len(rows), "hash": digest}})

    @app.post("/v1/admin/pipeline/snapshot", response_model=PipelineRunResponse)
    def admin_snapshot(body: PipelineRunRequest, session=Depends(session_dep)):
        import json as _json
        from pathlib import Path

        from ..caseload.rows import CaseloadRow
        from ..caseload.snapshots import DuplicateSnapshot, SnapshotStore

        _admin_guard(session)
        try:
            model_file = Path(state.config.model_dir) / f"caseload-{body.as_of}.jsonl"
            if not model_file.exists():
                raise _error(404, "no_model", f"no caseload build for {body.as_of}")
            rows = []
            with open(model_file, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        obj = _json.loads(line)
                        obj["duration_band_label"] = obj.pop("duration_band")
                        rows.append(CaseloadRow(**obj))
            try:
                snap = SnapshotStore(state.config.snapshot_dir).snapshot_caseload(rows, body.as_of)
            except DuplicateSnapshot as exc:
                raise _error(409, "duplicate_snapshot", str(exc))
        finally:
            state.admin_lock.release()
        return PipelineRunResponse(
            summary={"snapshot": {"date": snap.snapshot_date, "hash": snap.content_hash}})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "indices": state.engine.indices()}

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(frontend_dir), html=True), name="app")

    return app
