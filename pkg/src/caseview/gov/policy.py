"""Role policy: index grants, field-level actions, document scoping."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

ROLES = ("clinical", "non_clinical")
FIELD_ACTIONS = ("pass", "drop", "pseudonymize", "generalize")


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class FieldPolicy:
    field: str
    action: str  # pass | drop | pseudonymize | generalize
    to: str | None = None  # generalize target, e.g. dob -> birth_year

    def __post_init__(self):
        if self.action not in FIELD_ACTIONS:
            raise PolicyError(f"bad field action {self.action!r} for {self.field!r}")


@dataclass(frozen=True)
class RolePolicy:
    name: str
    indices: frozenset[str]
    field_policies: dict[str, FieldPolicy]
    doc_scope: dict[str, dict]  # index -> stored filter predicate
    deep_links: bool

    def non_pass_fields(self) -> set[str]:
        return {f for f, p in self.field_policies.items() if p.action != "pass"}


@dataclass(frozen=True)
class Policy:
    version: int
    roles: dict[str, RolePolicy]
    identity_fields: tuple[str, ...]

    def role(self, name: str) -> RolePolicy:
        if name not in self.roles:
            raise PolicyError(f"unknown role {name!r}")
        return self.roles[name]

    def validate(self) -> None:
        """Clinical must dominate non-clinical; every identity field needs a
        non-pass action for non_clinical."""
        clinical = self.role("clinical")
        non_clinical = self.role("non_clinical")
        if not non_clinical.indices <= clinical.indices:
            raise PolicyError("non_clinical indices exceed clinical grants")
        for f in self.identity_fields:
            policy = non_clinical.field_policies.get(f)
            if policy is None or policy.action == "pass":
                raise PolicyError(f"identity field {f!r} lacks a non-pass action for non_clinical")

    @classmethod
    def from_dict(cls, obj: dict) -> "Policy":
        roles = {}
        for name, spec in obj.get("roles", {}).items():
            policies = {}
            for fname, fspec in (spec.get("field_policies") or {}).items():
                policies[fname] = FieldPolicy(
                    field=fname, action=fspec.get("action", "pass"), to=fspec.get("to")
                )
            roles[name] = RolePolicy(
                name=name,
                indices=frozenset(spec.get("indices", ())),
                field_policies=policies,
                doc_scope=spec.get("doc_scope") or {},
                deep_links=bool(spec.get("deep_links", False)),
            )
        policy = cls(
            version=int(obj.get("version", 1)),
            roles=roles,
            identity_fields=tuple(obj.get("identity_fields", ())),
        )
        policy.validate()
        return policy

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Policy":
        if path is None:
            text = resources.files("caseview.data").joinpath("policy.yaml").read_text()
        else:
            text = Path(path).read_text()
        return cls.from_dict(yaml.safe_load(text))
