"""Shared fixtures: a small generated workspace and a served API."""

from __future__ import annotations

import pytest

from caseview.config import AppConfig, write_default_config
from caseview.etl.staging import StagingStore
from caseview.pipeline import run_all
from caseview.synth.generator import GENERATION_DATE, generate_cohort
from caseview.synth.store import SourceStore

SMALL_SEED = 1301
SMALL_N = 400


@pytest.fixture(scope="session")
def small_ws(tmp_path_factory):
    """A 400-patient workspace with the full pipeline run once."""
    ws = tmp_path_factory.mktemp("small_ws")
    write_default_config(ws, deployment_key="fixture-key-0001")
    config = AppConfig.load(ws / "config.yaml")
    generate_cohort(seed=SMALL_SEED, n=SMALL_N, out_path=config.source)
    summary = run_all(config, GENERATION_DATE)
    return {"ws": ws, "config": config, "summary": summary, "as_of": GENERATION_DATE}


@pytest.fixture(scope="session")
def small_source(small_ws):
    store = SourceStore.open(small_ws["config"].source)
    yield store
    store.close()


@pytest.fixture(scope="session")
def small_staging(small_ws):
    staging = StagingStore.open(small_ws["config"].staging)
    yield staging
    staging.close()


@pytest.fixture(scope="session")
def small_rows(small_staging, small_ws):
    from caseview.caseload.build import build_caseload

    return build_caseload(
        small_staging, small_ws["as_of"], small_ws["config"].deployment_key
    )


@pytest.fixture(scope="session")
def small_bundles(small_staging):
    from caseview.caseload.build import bundle_patients

    return bundle_patients(small_staging)


@pytest.fixture(scope="session")
def api(small_ws):
    """TestClient plus logged-in clinical and non-clinical sessions."""
    from fastapi.testclient import TestClient

    from caseview.service.app import create_app
    from caseview.service.state import AppState

    state = AppState.from_config(small_ws["config"])
    client = TestClient(create_app(state))
    tokens = {}
    for user, password in (
        ("dr_ellis", "clinical-dev-password"),
        ("analyst_rowe", "analyst-dev-password"),
    ):
        response = client.post("/v1/login", json={"username": user, "password": password})
        assert response.status_code == 200, response.text
        tokens[user] = response.json()["token"]
    return {
        "client": client,
        "state": state,
        "clinical": {"Authorization": f"Bearer {tokens['dr_ellis']}"},
        "non_clinical": {"Authorization": f"Bearer {tokens['analyst_rowe']}"},
    }
