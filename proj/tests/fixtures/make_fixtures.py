#!/usr/bin/env python3
"""Regenerates the ADS report corpus, ADS mileage and published benchmark rates.

The outputs are committed; rerun only when the corpus layout changes:
    python3 tests/fixtures/make_fixtures.py
"""

import csv
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

MILES = {"Phoenix": 31.159e6, "SanFrancisco": 18.260e6, "LosAngeles": 6.448e6, "Austin": 0.834e6}
CITY = {"Phoenix": "Phoenix", "SanFrancisco": "San Francisco", "LosAngeles": "Los Angeles", "Austin": "Austin"}
STATE = {"Phoenix": "AZ", "SanFrancisco": "CA", "LosAngeles": "CA", "Austin": "TX"}
CENTER = {
    "Phoenix": (33.4255, -111.9400),
    "SanFrancisco": (37.7749, -122.4194),
    "LosAngeles": (34.0522, -118.3437),
    "Austin": (30.2672, -97.7431),
}

# crash type -> (Crash With, Annot Configuration, partner override, sequence position)
TYPE = {
    "Cyclist": ("Cyclist", "OtherOrUnknown", "", 1),
    "Motorcycle": ("Motorcycle", "OtherOrUnknown", "", 1),
    "Pedestrian": ("Pedestrian", "OtherOrUnknown", "", 1),
    "SecondaryCrash": ("Passenger Car", "FrontToRear", "", 2),
    "SingleVehicle": ("Other Fixed Object", "SingleVehicle", "", 1),
    "V2VF2R": ("SUV", "FrontToRear", "", 1),
    "V2VOppositeDirection": ("Passenger Car", "OppositeDirection", "", 1),
    "V2VIntersection": ("Passenger Car", "IntersectionTurningOrCrossing", "", 1),
    "V2VLateral": ("Pickup Truck", "LateralSameDirection", "", 1),
    "Other": ("Passenger Car", "OtherOrUnknown", "", 1),
}

KINEMATICS = {
    "stopped": lambda r: (round(r.uniform(6, 40), 1), 0.0),
    "constant": lambda r: (0.0, round(r.uniform(0.05, 0.6), 2)),
    "moderate": lambda r: (0.0, round(r.uniform(0.9, 3.3), 2)),
    "hard": lambda r: (0.0, round(r.uniform(3.7, 6.5), 2)),
}

# (location, type, injury, airbag, extras...) ; injury/airbag are booleans.
# F2R rows carry a pre-crash movement label.
def corpus_plan():
    plan = []

    def add(loc, kind, n, injury, airbag, **extra):
        for _ in range(n):
            plan.append(dict(loc=loc, kind=kind, injury=injury, airbag=airbag, **extra))

    # Phoenix: 24 injury, 8 airbag
    add("Phoenix", "Motorcycle", 2, True, False)
    add("Phoenix", "SecondaryCrash", 1, True, False)
    for move in ["stopped"] * 4:
        add("Phoenix", "V2VF2R", 1, True, True, move=move)
    add("Phoenix", "V2VF2R", 1, False, True, move="stopped")
    for move in ["stopped", "constant", "constant"] + ["moderate"] * 5 + ["hard"] * 3:
        add("Phoenix", "V2VF2R", 1, True, False, move=move)
    add("Phoenix", "V2VOppositeDirection", 1, True, True)
    add("Phoenix", "V2VIntersection", 2, True, True)
    add("Phoenix", "V2VIntersection", 1, True, False)
    add("Phoenix", "V2VLateral", 2, True, False)
    # San Francisco: 16 injury, 7 airbag, 2 serious
    add("SanFrancisco", "Cyclist", 2, True, False)
    add("SanFrancisco", "Pedestrian", 1, True, False)
    add("SanFrancisco", "SecondaryCrash", 1, True, True, severity="Serious", police="A")
    add("SanFrancisco", "SecondaryCrash", 1, True, False, severity="Fatality", police="K")
    add("SanFrancisco", "SecondaryCrash", 1, True, False, severity="Serious", police="C")
    add("SanFrancisco", "V2VF2R", 1, True, True, move="constant")
    for move in ["moderate"] * 4 + ["hard"] * 3:
        add("SanFrancisco", "V2VF2R", 1, True, False, move=move)
    add("SanFrancisco", "V2VLateral", 1, True, True)
    add("SanFrancisco", "V2VLateral", 1, True, False)
    add("SanFrancisco", "V2VOppositeDirection", 1, False, True)
    add("SanFrancisco", "V2VIntersection", 2, False, True)
    add("SanFrancisco", "Other", 1, False, True, manual_airbag=True)
    # Los Angeles: 8 injury, 2 airbag
    add("LosAngeles", "Cyclist", 1, True, False)
    add("LosAngeles", "Pedestrian", 1, True, False, severity="Unknown", narrative_injury=True)
    add("LosAngeles", "SingleVehicle", 1, True, False)
    add("LosAngeles", "V2VF2R", 1, True, True, move="moderate")
    add("LosAngeles", "V2VF2R", 1, True, False, move="moderate")
    add("LosAngeles", "V2VOppositeDirection", 1, True, False)
    add("LosAngeles", "V2VIntersection", 1, True, False)
    add("LosAngeles", "Other", 1, True, False)
    add("LosAngeles", "SecondaryCrash", 1, False, True)
    # Austin: 1 airbag
    add("Austin", "V2VIntersection", 1, False, True)
    return plan


HEADER = [
    "Report ID", "Report Version", "Reporting Entity", "State", "City", "Roadway Type", "Crash With",
    "Highest Injury Severity Alleged", "SV Any Air Bags Deployed?", "CP Any Air Bags Deployed?",
    "Law Enforcement Investigating?", "Latitude", "Longitude", "Narrative",
    "Annot Service Area", "Annot Narrative Injury", "Annot Any Vehicle Airbag", "Annot Police Severity",
    "Annot In Transport", "Annot Impacted", "Annot Sequence Position", "Annot Configuration",
    "Annot Partner Body Class", "Annot Initiator Role", "Annot F2R Role", "Annot Stopped Duration S",
    "Annot Peak Decel Mps2",
]


def sgo_rows(rng):
    plan = corpus_plan()
    extra = [
        # Emitted but outside every table outcome.
        dict(loc="Phoenix", kind="V2VLateral", injury=False, airbag=False),
        dict(loc="SanFrancisco", kind="Other", injury=False, airbag=False),
        dict(loc="LosAngeles", kind="V2VF2R", injury=False, airbag=False, move="stopped"),
        # Dropped by ingest.
        dict(loc="Phoenix", kind="V2VIntersection", injury=True, airbag=True, roadway="Highway / Freeway"),
        dict(loc="SanFrancisco", kind="V2VF2R", injury=True, airbag=False, in_transport="No", move="stopped"),
        dict(loc="Phoenix", kind="Other", injury=True, airbag=False, impacted="No"),
    ]
    rng.shuffle(plan)
    rows = []
    for i, p in enumerate(plan + extra):
        crash_with, config, partner, seq = TYPE[p["kind"]]
        lat0, lon0 = CENTER[p["loc"]]
        severity = p.get("severity") or (rng.choice(["Minor", "Minor", "Moderate"]) if p["injury"] else "No Injuries Reported")
        manual = p.get("manual_airbag", False)
        sv_airbag = "Yes" if p["airbag"] and not manual and rng.random() < 0.6 else "No"
        cp_airbag = "Yes" if p["airbag"] and not manual and sv_airbag == "No" else "No"
        stopped = decel = ""
        f2r = ""
        if p["kind"] == "V2VF2R":
            f2r = "Struck"
            s, d = KINEMATICS[p["move"]](rng)
            stopped, decel = f"{s}", f"{d}"
        rows.append({
            "Report ID": f"30270-{8100 + 7 * i}",
            "Report Version": str(rng.choice([1, 1, 2])),
            "Reporting Entity": "Fleet Operator",
            "State": STATE[p["loc"]],
            "City": CITY[p["loc"]],
            "Roadway Type": p.get("roadway", rng.choice(["Street", "Intersection", "Parking Lot Access"])),
            "Crash With": crash_with,
            "Highest Injury Severity Alleged": severity,
            "SV Any Air Bags Deployed?": sv_airbag,
            "CP Any Air Bags Deployed?": cp_airbag,
            "Law Enforcement Investigating?": "Yes" if p["injury"] or p["airbag"] else rng.choice(["Yes", "No"]),
            "Latitude": f"{lat0 + rng.uniform(-0.06, 0.06):.5f}",
            "Longitude": f"{lon0 + rng.uniform(-0.06, 0.06):.5f}",
            "Narrative": "[REDACTED, MAY CONTAIN CONFIDENTIAL BUSINESS INFORMATION]",
            "Annot Service Area": p["loc"],
            "Annot Narrative Injury": "Yes" if p.get("narrative_injury") else "No",
            "Annot Any Vehicle Airbag": "Yes" if p["airbag"] else "No",
            "Annot Police Severity": p.get("police", ""),
            "Annot In Transport": p.get("in_transport", "Yes"),
            "Annot Impacted": p.get("impacted", "Yes"),
            "Annot Sequence Position": str(seq),
            "Annot Configuration": config,
            "Annot Partner Body Class": partner,
            "Annot Initiator Role": "Responder",
            "Annot F2R Role": f2r,
            "Annot Stopped Duration S": stopped,
            "Annot Peak Decel Mps2": decel,
        })
    return plan, rows


def ads_counts(plan):
    counts = {}
    for p in plan:
        keys = [p["kind"]] + (["V2VF2R:Struck"] if p["kind"] == "V2VF2R" else [])
        outcomes = []
        if p["injury"]:
            outcomes.append("AnyInjuryReported")
        if p["airbag"]:
            outcomes.append("AirbagDeployment")
        if p.get("police") in ("A", "K"):
            outcomes.append("SuspectedSeriousInjuryPlus")
        for o in outcomes:
            for k in keys + ["All"]:
                for loc in (p["loc"], "AllLocations"):
                    counts[(loc, o, k)] = counts.get((loc, o, k), 0) + 1
    return counts


def refine(row, count, miles):
    """Human rate consistent with every rounded published figure in the row."""
    m = miles / 1e6
    ipmm = float(row["human_ipmm"])
    lo, hi = max(ipmm - 0.005, 0.0), ipmm + 0.005
    delta = float(row["expected_delta"])
    lo, hi = max(lo, (count - delta - 0.05) / m), min(hi, (count - delta + 0.05) / m)
    pct = float(row["percent_diff"])
    if count > 0:
        ads = count / m
        lo, hi = max(lo, ads / (1 + (pct + 0.5) / 100)), min(hi, ads / (1 + (pct - 0.5) / 100))
    if lo > hi:
        raise SystemExit(f"no rate fits {row}")
    return 0.5 * (max(lo, 0.0) + hi)


def main():
    rng = random.Random(20250117)
    plan, rows = sgo_rows(rng)
    with open(HERE / "ads" / "sgo_reports.csv", "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=HEADER, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    with open(HERE / "ads" / "ro_miles.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Service Area", "Roadway", "RO Miles"])
        for loc, miles in MILES.items():
            w.writerow([CITY[loc], "Surface", f"{miles:.0f}"])

    counts = ads_counts(plan)
    total_miles = sum(MILES.values())
    with open(HERE / "published" / "summary.csv") as f:
        summary = list(csv.DictReader(f))
    with open(HERE / "published" / "benchmarks.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["location", "outcome", "crash_type", "rate", "effective_count", "exposure",
                    "underreporting_applied", "dynamic_applied"])
        for row in summary:
            loc = row["location"]
            miles = total_miles if loc == "AllLocations" else MILES[loc]
            count = counts.get((loc, row["outcome"], row["crash_type"]), 0)
            rate = refine(row, count, miles)
            n = 1e6
            w.writerow([loc, row["outcome"], row["crash_type"], repr(rate), repr(n), repr(1e6 * n / rate),
                        "true" if row["outcome"] == "AnyInjuryReported" else "false", "true"])


if __name__ == "__main__":
    main()
