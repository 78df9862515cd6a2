"""Cohort composition targets and quota sampling.

Marginal targets are published census proportions for the active and
inactive caseload strata; the joint distribution is sampled as conditionally
independent given active status. Quota allocation with largest-remainder
rounding pins every marginal to its target up to integer rounding.
"""

from __future__ import annotations

import random

ACTIVE_FRACTION = 12.44  # percent

GENDERS = ("female", "male", "unknown")
ETHNICITIES = ("White", "Black", "Asian", "Mixed", "Other", "Unknown")
BOROUGHS = ("Croydon", "Lambeth", "Lewisham", "Southwark", "Homeless", "Other")
DIAGNOSIS_CHAPTERS = (
    "F0", "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9", "F99", "FX", "Z",
    "other_illness", "none",
)

# percent within each stratum
GENDER_PCT = {
    "active": {"female": 52.51, "male": 47.03, "unknown": 0.47},
    "inactive": {"female": 51.47, "male": 48.32, "unknown": 0.21},
}
ETHNICITY_PCT = {
    "active": {"White": 45.42, "Black": 20.86, "Asian": 5.44, "Mixed": 9.89, "Other": 6.13, "Unknown": 12.26},
    "inactive": {"White": 41.32, "Black": 13.41, "Asian": 4.82, "Mixed": 3.37, "Other": 5.62, "Unknown": 31.47},
}
BOROUGH_PCT = {
    "active": {"Croydon": 21.36, "Lambeth": 20.51, "Lewisham": 16.85, "Southwark": 14.52, "Homeless": 0.86, "Other": 25.90},
    "inactive": {"Croydon": 16.91, "Lambeth": 15.45, "Lewisham": 15.00, "Southwark": 15.27, "Homeless": 1.69, "Other": 35.68},
}
DIAGNOSIS_PCT = {
    "active": {
        "F0": 2.45, "F1": 7.06, "F2": 10.80, "F3": 6.72, "F4": 8.56, "F5": 3.04,
        "F6": 2.99, "F7": 0.81, "F8": 4.35, "F9": 7.36, "F99": 3.57, "FX": 3.97,
        "Z": 8.75, "other_illness": 0.48, "none": 29.09,
    },
    "inactive": {
        "F0": 3.80, "F1": 7.78, "F2": 3.86, "F3": 10.74, "F4": 11.15, "F5": 3.28,
        "F6": 2.13, "F7": 0.63, "F8": 2.78, "F9": 5.51, "F99": 10.04, "FX": 4.98,
        "Z": 11.12, "other_illness": 1.71, "none": 20.49,
    },
}
AGE_MEAN_SD = {"active": (33.34, 19.11), "inactive": (41.29, 18.25)}
AGE_RANGE = (0.0, 105.0)

# whole-cohort targets, used to validate generated stores
OVERALL_PCT = {
    "active": {"active": 12.44, "inactive": 87.56},
    "gender": {"female": 51.60, "male": 48.16, "unknown": 0.24},
    "ethnicity": {"White": 41.83, "Black": 14.34, "Asian": 4.89, "Mixed": 4.18, "Other": 5.68, "Unknown": 29.08},
    "borough": {"Croydon": 17.46, "Lambeth": 16.08, "Lewisham": 15.23, "Southwark": 15.18, "Homeless": 1.59, "Other": 34.46},
    "diagnosis": {
        "F0": 3.63, "F1": 7.69, "F2": 4.72, "F3": 10.24, "F4": 10.82, "F5": 3.25,
        "F6": 2.23, "F7": 0.65, "F8": 2.97, "F9": 5.74, "F99": 9.24, "FX": 4.85,
        "Z": 10.83, "other_illness": 1.55,
        "none": 21.59,  # remainder: patients with no recorded diagnosis
    },
}

STRATUM_PCT = {
    "gender": GENDER_PCT,
    "ethnicity": ETHNICITY_PCT,
    "borough": BOROUGH_PCT,
    "diagnosis": DIAGNOSIS_PCT,
}


def quota_counts(targets: dict[str, float], n: int) -> dict[str, int]:
    """Integer allocation of n items to categories via largest remainders."""
    total = sum(targets.values())
    raw = {k: n * v / total for k, v in targets.items()}
    counts = {k: int(raw[k]) for k in targets}
    short = n - sum(counts.values())
    by_remainder = sorted(targets, key=lambda k: (-(raw[k] - counts[k]), k))
    for k in by_remainder[:short]:
        counts[k] += 1
    return counts


def quota_assignment(targets: dict[str, float], n: int, rng: random.Random) -> list[str]:
    """A shuffled category label per item, hitting quota counts exactly."""
    labels: list[str] = []
    for category, count in quota_counts(targets, n).items():
        labels.extend([category] * count)
    rng.shuffle(labels)
    return labels


def sample_age(stratum: str, rng: random.Random) -> float:
    """Truncated normal age draw for a stratum."""
    mean, sd = AGE_MEAN_SD[stratum]
    lo, hi = AGE_RANGE
    while True:
        age = rng.gauss(mean, sd)
        if lo <= age <= hi:
            return age
