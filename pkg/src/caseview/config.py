"""Application configuration: one versioned YAML file.

Holds store paths, shard count, the policy file reference, the deep-link
template, the deployment key for pseudonyms, and local user accounts.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field
from pathlib import Path

import yaml

CONFIG_VERSION = 1

PBKDF2_ITERATIONS = 60_000


def hash_password(password: str, salt: str | None = None) -> str:
    salt = salt or secrets.token_hex(8)
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), bytes.fromhex(salt), PBKDF2_ITERATIONS
    ).hex()
    return f"pbkdf2${PBKDF2_ITERATIONS}${salt}${digest}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iterations, salt, digest = stored.split("$")
        if scheme != "pbkdf2":
            return False
        actual = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt), int(iterations)
        ).hex()
        return secrets.compare_digest(actual, digest)
    except (ValueError, TypeError):
        return False


@dataclass
class UserAccount:
    username: str
    role: str
    password_hash: str


@dataclass
class AppConfig:
    workspace: Path
    source: Path
    staging: Path
    labels: Path
    model_dir: Path
    snapshot_dir: Path
    index_dir: Path
    audit_log: Path
    etl_runs: Path
    shard_count: int = 3
    policy_file: Path | None = None  # None -> bundled default
    deployment_key: str = "dev-deployment-key"
    deep_link_template: str = "https://ehr.example.local/patient/{patient_id}"
    token_ttl_seconds: int = 3600
    users: list[UserAccount] = field(default_factory=list)
    complexity: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "AppConfig":
        path = Path(path)
        obj = yaml.safe_load(path.read_text())
        if int(obj.get("version", 0)) != CONFIG_VERSION:
            raise ValueError(f"unsupported config version in {path}")
        workspace = Path(obj.get("workspace", path.parent)).resolve()
        paths = obj.get("paths", {})

        def p(key: str, default: str) -> Path:
            raw = Path(paths.get(key, default))
            return raw if raw.is_absolute() else workspace / raw

        policy_file = obj.get("policy_file")
        if policy_file is not None:
            policy_file = Path(policy_file)
            if not policy_file.is_absolute():
                policy_file = workspace / policy_file
        return cls(
            workspace=workspace,
            source=p("source", "source.db"),
            staging=p("staging", "staging.db"),
            labels=p("labels", "labels.jsonl"),
            model_dir=p("model_dir", "model"),
            snapshot_dir=p("snapshot_dir", "model/snapshots"),
            index_dir=p("index_dir", "index"),
            audit_log=p("audit_log", "audit.log"),
            etl_runs=p("etl_runs", "etl_runs.jsonl"),
            shard_count=int(obj.get("shard_count", 3)),
            policy_file=policy_file,
            deployment_key=str(obj.get("deployment_key", "dev-deployment-key")),
            deep_link_template=str(obj.get("deep_link_template", cls.deep_link_template)),
            token_ttl_seconds=int(obj.get("token_ttl_seconds", 3600)),
            users=[
                UserAccount(u["username"], u["role"], u["password_hash"])
                for u in obj.get("users", [])
            ],
            complexity=obj.get("complexity") or {},
        )


DEFAULT_USERS = (
    ("dr_ellis", "clinical", "clinical-dev-password"),
    ("analyst_rowe", "non_clinical", "analyst-dev-password"),
)


def write_default_config(workspace: str | Path, deployment_key: str | None = None) -> Path:
    """Materialize a workspace config with the default dev accounts."""
    workspace = Path(workspace)
    workspace.mkdir(parents=True, exist_ok=True)
    config = {
        "version": CONFIG_VERSION,
        "workspace": str(workspace.resolve()),
        "paths": {
            "source": "source.db",
            "staging": "staging.db",
            "labels": "labels.jsonl",
            "model_dir": "model",
            "snapshot_dir": "model/snapshots",
            "index_dir": "index",
            "audit_log": "audit.log",
            "etl_runs": "etl_runs.jsonl",
        },
        "shard_count": 3,
        "policy_file": None,
        "deployment_key": deployment_key or secrets.token_hex(16),
        "deep_link_template": "https://ehr.example.local/patient/{patient_id}",
        "token_ttl_seconds": 3600,
        "users": [
            {"username": name, "role": role, "password_hash": hash_password(password)}
            for name, role, password in DEFAULT_USERS
        ],
        "complexity": {},
    }
    out = workspace / "config.yaml"
    out.write_text(yaml.safe_dump(config, sort_keys=False))
    return out
