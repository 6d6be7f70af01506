#!/usr/bin/env python3
"""Regenerate tests/data/records_seed.csv, the demo parts catalog.

The first rows are hand-placed to pin specific search behaviours (token
frequency ranking, rank ties resolved by id, substring-vs-token cases);
the rest cycle a small vocabulary deterministically.  120 rows total.
"""

from __future__ import annotations

import csv
from pathlib import Path

HAND_ROWS = [
    (1, "Gear box", "drive", "Steel gear box with 5mm shaft"),
    (2, "Gearbox mount", "drive", "Mount bracket for a gear unit"),
    (3, "Ball bearing", "drive", "Sealed unit, 8mm bore"),
    (4, "Roller bearing", "drive", "Open cage, 8mm bore"),
    (5, "Junction box", "enclosure", "Waterproof junction housing"),
    (6, "Front panel", "enclosure", "Brushed aluminium face plate"),
    (7, "Drive shaft", "drive", "Hardened 5mm drive shaft"),
    (8, "Servo motor", "electronics", "12V servo with metal gear train"),
    (9, "Box spanner", "tool", "Double ended box spanner 8mm 10mm"),
    (10, "Sensor cable", "electronics", "Shielded cable, 2m, 4 pin"),
    (11, "Panel clip", "fastener", "Nylon clip for panel edges"),
    (12, "Gear puller", "tool", "Two arm gear puller for small gears"),
]

ADJECTIVES = ["Compact", "Heavy", "Precision", "Standard", "Miniature", "Industrial"]
NOUNS = ["coupler", "spacer", "flange", "bushing", "washer", "bracket",
         "spring", "gasket", "pulley", "sprocket", "clamp", "grommet"]
CATEGORIES = ["drive", "enclosure", "electronics", "fastener", "tool"]
MATERIALS = ["steel", "brass", "nylon", "aluminium", "rubber"]
SIZES = ["3mm", "5mm", "8mm", "10mm", "12mm"]


def main() -> None:
    rows = list(HAND_ROWS)
    next_id = len(HAND_ROWS) + 1
    for i in range(120 - len(HAND_ROWS)):
        adj = ADJECTIVES[i % len(ADJECTIVES)]
        noun = NOUNS[i % len(NOUNS)]
        cat = CATEGORIES[i % len(CATEGORIES)]
        material = MATERIALS[i % len(MATERIALS)]
        size = SIZES[(i // 3) % len(SIZES)]
        name = f"{adj} {noun}"
        desc = f"{material.capitalize()} {noun}, {size} fit"
        rows.append((next_id, name, cat, desc))
        next_id += 1
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "records_seed.csv"
    with out.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "name", "category", "description"])
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
