"""Shared application state wired from one config file."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..caseload.build import PatientBundle, bundle_patients
from ..caseload.complexity import ComplexityConfig
from ..config import AppConfig
from ..etl.staging import StagingStore
from ..gov.audit import AuditLog
from ..gov.policy import Policy
from ..search.engine import SearchEngine
from .auth import SessionStore
from .dashboards import DashboardSpec, load_dashboards


@dataclass
class AppState:
    config: AppConfig
    policy: Policy
    engine: SearchEngine
    audit: AuditLog
    sessions: SessionStore
    dashboards: dict[str, DashboardSpec]
    admin_lock: threading.Lock = field(default_factory=threading.Lock)
    _cache_lock: threading.Lock = field(default_factory=threading.Lock)
    _staging: StagingStore | None = None
    _bundles: dict[str, PatientBundle] | None = None
    _pseudo_map: dict[str, str] | None = None

    @classmethod
    def from_config(cls, config: AppConfig, dashboards_dir: str | Path | None = None) -> "AppState":
        return cls(
            config=config,
            policy=Policy.load(config.policy_file),
            engine=SearchEngine(config.index_dir, shard_count=config.shard_count),
            audit=AuditLog(config.audit_log),
            sessions=SessionStore(config.users, ttl_seconds=config.token_ttl_seconds),
            dashboards=load_dashboards(dashboards_dir),
        )

    @property
    def complexity_config(self) -> ComplexityConfig:
        return ComplexityConfig.from_dict(self.config.complexity)

    def staging(self) -> StagingStore:
        with self._cache_lock:
            if self._staging is None:
                self._staging = StagingStore.open(self.config.staging)
            return self._staging

    def bundle(self, patient_id: str) -> PatientBundle | None:
        """Entities for one patient, cached after first full load.

        Request handlers run on arbitrary worker threads; the lock keeps the
        one-time load single-flight.
        """
        staging = self.staging()
        with self._cache_lock:
            if self._bundles is None:
                self._bundles = bundle_patients(staging)
            return self._bundles.get(patient_id)

    def pseudo_to_patient(self, pseudo_id: str) -> str | None:
        with self._cache_lock:
            if self._pseudo_map is None:
                mapping = {}
                if "caseload" in self.engine.indices():
                    for key, doc in self.engine.iter_docs("caseload"):
                        pseudo = doc.get("pseudo_id")
                        if pseudo:
                            mapping[pseudo] = key
                self._pseudo_map = mapping
            return self._pseudo_map.get(pseudo_id)

    def invalidate_model_caches(self) -> None:
        """After a pipeline run changes staging/indices."""
        with self._cache_lock:
            if self._staging is not None:
                self._staging.close()
            self._staging = None
            self._bundles = None
            self._pseudo_map = None
