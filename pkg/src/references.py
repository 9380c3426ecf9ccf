"""
Published reference figures for the three PROMISE datasets.

Carried verbatim; the MMRE rows of the two comparison methods are not
recomputed anywhere in this package.
"""

from src.models.evaluation import ReferenceResults

PROPOSED_METHOD = "Proposed Method"

REFERENCE_RESULTS = ReferenceResults(
    proposed_method=PROPOSED_METHOD,
    mmre_percent={
        PROPOSED_METHOD: {"nasa60": 5.15, "nasa93": 6.95, "desharnais": 4.98},
        "Analogy with Fuzzy Number": {
            "nasa60": 33.37,
            "nasa93": 28.55,
            "desharnais": 26.89,
        },
        "Fuzzy method": {"nasa60": 32.651, "nasa93": 54.81, "desharnais": 30.6},
    },
    project_counts={"nasa60": 60, "nasa93": 93, "desharnais": 77},
    actual_avg_effort={"nasa60": 406.413, "nasa93": 734.031, "desharnais": 5046.308},
    estimated_avg_effort={
        "nasa60": 359.324,
        "nasa93": 530.148,
        "desharnais": 4786.311,
    },
)

DISPLAY_NAMES = {"nasa60": "Nasa60", "nasa93": "Nasa93", "desharnais": "Desharnais"}
