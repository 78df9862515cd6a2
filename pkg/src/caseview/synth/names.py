"""Name pools, teams and practice codes for the synthetic cohort.

Patient name pools are deliberately distinctive and disjoint from staff
names, note-template vocabulary and the drug lexicon, so leak-sweep tests
can treat every patient name as a unique identity marker.
"""

GIVEN_FEMALE = (
    "Amelia", "Sophia", "Isla", "Freya", "Willow", "Rosalind", "Martha", "Esme",
    "Harriet", "Verity", "Tamsin", "Bronwen", "Cerys", "Saskia", "Imogen",
    "Clementine", "Ottilie", "Araminta", "Delphine", "Marisol", "Anoushka",
    "Zlata", "Katriona", "Morwenna", "Solange", "Yolanda", "Petra", "Ingrid",
    "Blanka", "Noor",
)

GIVEN_MALE = (
    "Oliver", "Arthur", "Hugo", "Felix", "Rory", "Tobias", "Barnaby", "Caspian",
    "Dmitri", "Ewan", "Farid", "Gregor", "Hamish", "Idris", "Jasper", "Kofi",
    "Laszlo", "Magnus", "Nikolai", "Osman", "Piers", "Quentin", "Rafferty",
    "Soren", "Tariq", "Umar", "Viktor", "Wilfred", "Yusuf", "Zoltan",
)

FAMILY_NAMES = (
    "Abberley", "Bancroft", "Carmody", "Dunmore", "Eastwick", "Fairhurst",
    "Galbraith", "Hartigan", "Inglewood", "Jocelyn", "Kirkbride", "Lockhart",
    "Merriweather", "Northgate", "Oakhurst", "Pemberton", "Quillan",
    "Ravenscroft", "Silverton", "Thackeray", "Underhill", "Vanstone",
    "Waverley", "Yardley", "Ashcombe", "Birkett", "Coleridge", "Draycott",
    "Ellsworth", "Fenwick", "Grantham", "Hollowell", "Iverson", "Jarrow",
    "Kestrel", "Langford", "Mortlake", "Netherby", "Ormsby", "Prescott",
)

STAFF_SURNAMES = (
    "Adeyemi", "Brennan", "Chowdhury", "Delgado", "Eriksen", "Fontaine",
    "Grigoryan", "Huang", "Ivanova", "Jankowski", "Koumba", "Lindqvist",
    "Moreau", "Nakamura", "Obi", "Petrov", "Quirke", "Rossi", "Santana",
    "Takahashi", "Ueda", "Vasquez", "Wolde", "Yilmaz",
)

TEAMS = (
    "Croydon North CMHT", "Croydon South CMHT",
    "Lambeth East CMHT", "Lambeth West CMHT",
    "Lewisham North CMHT", "Lewisham South CMHT",
    "Southwark North CMHT", "Southwark South CMHT",
    "Early Intervention Service", "Assertive Outreach Team",
    "Perinatal Mental Health Team", "Older Adults CMHT",
)

BOROUGH_TEAMS = {
    "Croydon": ("Croydon North CMHT", "Croydon South CMHT"),
    "Lambeth": ("Lambeth East CMHT", "Lambeth West CMHT"),
    "Lewisham": ("Lewisham North CMHT", "Lewisham South CMHT"),
    "Southwark": ("Southwark North CMHT", "Southwark South CMHT"),
}

SPECIALIST_TEAMS = (
    "Early Intervention Service", "Assertive Outreach Team",
    "Perinatal Mental Health Team", "Older Adults CMHT",
)

WARDS = ("Maple Ward", "Juniper Ward", "Hazel Ward", "Cedarwood Ward")

GP_PRACTICES = tuple(f"G{81001 + i}" for i in range(40))

_INITIALS = "ABCDEFGHJKLMNPRSTVW"


def coordinators_for(team: str) -> tuple[str, ...]:
    """4-6 stable coordinator display names per team ("A. Adeyemi" style)."""
    idx = TEAMS.index(team)
    count = 4 + (idx % 3)
    out = []
    for k in range(count):
        surname = STAFF_SURNAMES[(idx * 5 + k * 3) % len(STAFF_SURNAMES)]
        initial = _INITIALS[(idx + k * 7) % len(_INITIALS)]
        out.append(f"{initial}. {surname}")
    return tuple(out)


def consultants_for(team: str) -> tuple[str, ...]:
    idx = TEAMS.index(team)
    return tuple(
        f"Dr {STAFF_SURNAMES[(idx * 3 + k * 11 + 7) % len(STAFF_SURNAMES)]}" for k in range(2)
    )
