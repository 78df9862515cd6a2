"""Team caseload distribution across care coordinators."""

from __future__ import annotations

from dataclasses import dataclass, field

from .rows import CaseloadRow

UNASSIGNED = "(unassigned)"


class UnknownTeam(ValueError):
    pass


@dataclass
class DistributionTable:
    team: str
    rows: list[dict] = field(default_factory=list)  # one per coordinator + unassigned
    total: int = 0

    def to_json(self) -> dict:
        return {"team": self.team, "rows": self.rows, "total": self.total}


def caseload_distribution(rows: list[CaseloadRow], team: str) -> DistributionTable:
    """Active caseload per coordinator with complexity strata; totals sum to
    the team's active caseload, unassigned patients get their own row."""
    known_teams = {r.team for r in rows if r.team}
    if team not in known_teams:
        raise UnknownTeam(team)

    per: dict[str, dict] = {}
    total = 0
    for row in rows:
        if row.team != team or not row.active:
            continue
        total += 1
        coordinator = row.care_coordinator or UNASSIGNED
        slot = per.setdefault(
            coordinator,
            {"coordinator": coordinator, "patients": 0,
             "zones": {"red": 0, "amber": 0, "green": 0},
             "mean_complexity": 0.0, "_score_sum": 0.0},
        )
        slot["patients"] += 1
        slot["zones"][row.risk_zone] += 1
        slot["_score_sum"] += row.complexity_score

    table = DistributionTable(team=team, total=total)
    for coordinator in sorted(per, key=lambda c: (c == UNASSIGNED, c)):
        slot = per[coordinator]
        slot["mean_complexity"] = round(slot["_score_sum"] / slot["patients"], 3)
        del slot["_score_sum"]
        table.rows.append(slot)
    return table
