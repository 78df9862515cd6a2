"""Caseload complexity score and risk zones.

Weighted sum of documented factors; weights and thresholds are configuration,
not clinical guidance. The defaults (red >= 8, amber >= 4) are arbitrary and
documented as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ComplexityConfig:
    crisis_weight: float = 2.0
    ae_weight: float = 1.5
    chapter_weights: dict = field(
        default_factory=lambda: {
            "F2": 3.0, "F3": 2.0, "F1": 2.0, "F6": 2.0, "F0": 1.5, "none": 0.0
        }
    )
    default_chapter_weight: float = 1.0
    duration_weights: dict = field(
        default_factory=lambda: {"lt_1y": 0.0, "1_3y": 0.5, "gt_3y": 1.0}
    )
    red_threshold: float = 8.0
    amber_threshold: float = 4.0

    @classmethod
    def from_dict(cls, obj: dict | None) -> "ComplexityConfig":
        if not obj:
            return cls()
        base = cls()
        return cls(
            crisis_weight=obj.get("crisis_weight", base.crisis_weight),
            ae_weight=obj.get("ae_weight", base.ae_weight),
            chapter_weights=obj.get("chapter_weights", dict(base.chapter_weights)),
            default_chapter_weight=obj.get("default_chapter_weight", base.default_chapter_weight),
            duration_weights=obj.get("duration_weights", dict(base.duration_weights)),
            red_threshold=obj.get("red_threshold", base.red_threshold),
            amber_threshold=obj.get("amber_threshold", base.amber_threshold),
        )

    def scaled(self, factor: float) -> "ComplexityConfig":
        """All weights multiplied by a positive factor (thresholds too, so
        zone boundaries track the rescaled scores)."""
        return ComplexityConfig(
            crisis_weight=self.crisis_weight * factor,
            ae_weight=self.ae_weight * factor,
            chapter_weights={k: v * factor for k, v in self.chapter_weights.items()},
            default_chapter_weight=self.default_chapter_weight * factor,
            duration_weights={k: v * factor for k, v in self.duration_weights.items()},
            red_threshold=self.red_threshold * factor,
            amber_threshold=self.amber_threshold * factor,
        )


def complexity_score(
    crisis_contacts_12m: int,
    ae_attendances_12m: int,
    chapter: str,
    duration_band_label: str,
    config: ComplexityConfig | None = None,
) -> tuple[float, str]:
    cfg = config or ComplexityConfig()
    score = (
        cfg.crisis_weight * crisis_contacts_12m
        + cfg.ae_weight * ae_attendances_12m
        + cfg.chapter_weights.get(chapter, cfg.default_chapter_weight)
        + cfg.duration_weights.get(duration_band_label, 0.0)
    )
    score = round(score, 6)
    if score >= cfg.red_threshold:
        zone = "red"
    elif score >= cfg.amber_threshold:
        zone = "amber"
    else:
        zone = "green"
    return score, zone
