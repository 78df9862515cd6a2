"""Field-level masking and the identity-leak sweep."""

from __future__ import annotations

import re

from ..common import pseudonym
from .policy import Policy, RolePolicy


class PolicyGap(Warning):
    pass


def mask_row(row: dict, role_name: str, policy: Policy, deployment_key: str) -> dict:
    """Project a row through the role's field policies.

    Clinical rows pass unchanged. For other roles: drop/pseudonymize/
    generalize per policy; identity fields without a policy are dropped
    (fail closed) rather than passed.
    """
    role: RolePolicy = policy.role(role_name)
    if role_name == "clinical":
        return dict(row)
    out: dict = {}
    for field_name, value in row.items():
        fp = role.field_policies.get(field_name)
        if fp is None:
            if field_name in policy.identity_fields:
                continue  # policy gap: fail closed by dropping
            out[field_name] = value
            continue
        if fp.action == "pass":
            out[field_name] = value
        elif fp.action == "drop":
            continue
        elif fp.action == "pseudonymize":
            out[field_name] = pseudonym(deployment_key, str(value))
        elif fp.action == "generalize":
            target = fp.to or f"{field_name}_generalized"
            out[target] = _generalize(field_name, value)
    return out


def _generalize(field_name: str, value) -> object:
    text = str(value)
    if len(text) >= 4 and text[:4].isdigit():
        return int(text[:4])  # dates generalize to their year
    return text[:1]


_PATIENT_ID_RE = re.compile(r"\bp-\d{6}\b")


def scrub_patient_ids(payload, deployment_key: str):
    """Replace raw patient-id tokens anywhere in a JSON payload with their
    keyed pseudonyms (provenance ids embed patient ids by construction)."""
    if isinstance(payload, dict):
        return {k: scrub_patient_ids(v, deployment_key) for k, v in payload.items()}
    if isinstance(payload, list):
        return [scrub_patient_ids(v, deployment_key) for v in payload]
    if isinstance(payload, str):
        return _PATIENT_ID_RE.sub(lambda m: pseudonym(deployment_key, m.group()), payload)
    return payload


def build_identity_dictionary(patients) -> dict[str, set[str]]:
    """Names and NHS numbers of every generated patient (the sweep targets)."""
    names: set[str] = set()
    numbers: set[str] = set()
    for p in patients:
        names.add(p.given_name)
        names.add(p.family_name)
        numbers.add(p.nhs_number)
    return {"names": names, "numbers": numbers}


def find_leaks(text: str, dictionary: dict[str, set[str]]) -> list[str]:
    """Whole-word name matches and NHS-number substrings found in a payload.

    The name pool is small (~100 distinct values); numbers are checked by
    scanning the text once for 10-digit runs.
    """
    leaks = set()
    for name in dictionary["names"]:
        if re.search(rf"\b{re.escape(name)}\b", text):
            leaks.add(name)
    for candidate in re.findall(r"\d{10}", text):
        if candidate in dictionary["numbers"]:
            leaks.add(candidate)
    return sorted(leaks)
