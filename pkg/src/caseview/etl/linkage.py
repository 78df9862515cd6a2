"""Identity linkage: unify entities keyed by NHS number with patient ids."""

from __future__ import annotations

from dataclasses import dataclass, field

from .staging import StagingStore


@dataclass
class LinkageReport:
    merges: int = 0
    unresolved: list[str] = field(default_factory=list)  # entity ids with unknown NHS numbers
    conflicts: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "merges": self.merges,
            "unresolved": self.unresolved,
            "conflicts": self.conflicts,
        }


def link_records(staging: StagingStore, nhs_index: dict[str, str]) -> LinkageReport:
    """Rewrite nhs-keyed entities to patient keys; flag identity conflicts.

    An entity carrying both a patient id and an NHS number that resolves to a
    different patient is flagged as a conflict and left unmerged (the source
    row is contradictory; merging would guess).
    """
    report = LinkageReport()
    updates: list[tuple[str, str]] = []
    for row in staging.conn.execute(
        "SELECT entity_id, patient_key, payload FROM entities "
        "WHERE patient_key LIKE 'nhs:%' OR payload LIKE '%\"_nhs_number\"%' ORDER BY entity_id"
    ):
        entity_id, patient_key, payload_json = row
        if patient_key.startswith("nhs:"):
            nhs = patient_key[4:]
            resolved = nhs_index.get(nhs)
            if resolved is None:
                report.unresolved.append(entity_id)
            else:
                updates.append((resolved, entity_id))
                report.merges += 1
        else:
            # row carries both identifiers; cross-check them
            import json as _json

            nhs = _json.loads(payload_json).get("_nhs_number")
            resolved = nhs_index.get(nhs)
            if resolved is not None and resolved != patient_key:
                report.conflicts.append(
                    {
                        "entity_id": entity_id,
                        "nhs_number": nhs,
                        "patient_id_row": patient_key,
                        "patient_id_nhs": resolved,
                    }
                )
    if updates:
        staging.conn.executemany(
            "UPDATE entities SET patient_key=? WHERE entity_id=?", updates
        )
    return report
