"""Authorization decisions at index, document and field level."""

from __future__ import annotations

from dataclasses import dataclass, field

from .policy import Policy, RolePolicy


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str
    role: str
    index: str
    granted_fields: frozenset[str] | None = None  # None -> all fields
    doc_filter: dict | None = None  # stored predicate to AND onto the query

    @property
    def denied(self) -> bool:
        return not self.allowed


def authorize(
    role_name: str,
    index: str,
    policy: Policy,
    queried_fields: tuple[str, ...] = (),
    all_fields: tuple[str, ...] = (),
) -> Decision:
    """Grant or deny a data access.

    - index not granted to the role: deny (reason index_not_granted)
    - query predicates touching non-pass fields: deny (fail closed; masked
      output fields are fine, filtering on them would leak via counts)
    - otherwise: allow, with the output field set reduced to granted fields
      and the role's stored document predicate attached.
    """
    role: RolePolicy = policy.role(role_name)
    if index not in role.indices:
        return Decision(False, "index_not_granted", role_name, index)
    blocked = role.non_pass_fields()
    touched = [f for f in queried_fields if f in blocked]
    if touched:
        return Decision(False, f"field_not_queryable:{','.join(sorted(touched))}", role_name, index)
    granted = None
    if all_fields:
        dropped = {f for f in blocked if role.field_policies[f].action == "drop"}
        granted = frozenset(f for f in all_fields if f not in dropped)
    return Decision(
        True, "granted", role_name, index,
        granted_fields=granted,
        doc_filter=role.doc_scope.get(index),
    )
