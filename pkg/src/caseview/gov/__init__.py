"""Role-based authorization, masking/pseudonymization and audit logging."""

from ..common import pseudonym
from .audit import (
    AuditChainBroken,
    AuditEvent,
    AuditLog,
    AuditUnavailable,
    audit_stats,
)
from .authorize import Decision, authorize
from .mask import PolicyGap, build_identity_dictionary, find_leaks, mask_row
from .policy import FieldPolicy, Policy, PolicyError, RolePolicy

__all__ = [
    "AuditChainBroken",
    "AuditEvent",
    "AuditLog",
    "AuditUnavailable",
    "Decision",
    "FieldPolicy",
    "Policy",
    "PolicyError",
    "PolicyGap",
    "RolePolicy",
    "audit_stats",
    "authorize",
    "build_identity_dictionary",
    "find_leaks",
    "mask_row",
    "pseudonym",
]
