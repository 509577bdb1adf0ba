#!/usr/bin/env python3
"""Regenerate the curated chart reference naming fixture.

The baseline comes from nearest-focal-colour assignment in Lab; the
OVERRIDES table then records the hand-curated calls for boundary chips
(reviewed individually against their Lab coordinates). The result is a
complete 330-chip reference in the standard reference CSV format.

Run from the repository root:  python3 scripts/make_chart_reference.py
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chromaterm.evaluation import load_chart
from chromaterm.resources import bundled_chart_path

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "chart_reference.csv"

FOCI = {
    "black": (16.0, 0.0, 0.0),
    "blue": (44.0, 5.0, -38.0),
    "brown": (38.0, 24.0, 28.0),
    "green": (50.0, -38.0, 30.0),
    "grey": (53.0, 0.0, 0.0),
    "orange": (62.0, 34.0, 48.0),
    "pink": (72.0, 26.0, 8.0),
    "purple": (36.0, 42.0, -38.0),
    "red": (45.0, 55.0, 33.0),
    "white": (89.0, 0.0, 0.0),
    "yellow": (84.0, -5.0, 62.0),
}

# Hand-curated boundary chips, keyed by (row, column). Rationale noted
# per chip; hue angles are CIELAB h_ab in degrees.
OVERRIDES = {
    (2, 33): "purple",  # L81 C37 h308: light violet, clearly chromatic
    (4, 38): "pink",    # L61 C74 h353: vivid magenta reads pink
    (5, 4): "orange",   # L51 C85 h47: red-orange boundary, leans orange
    (6, 31): "blue",    # L41 C70 h290: deep violet-blue, still blue
    (8, 29): "blue",    # L20 C27 h272: navy, dark blue rather than black
    (3, 0): "white",    # N8: off-white column top
    (4, 0): "grey",     # N7 downwards: mid greys
}


def main() -> None:
    chart = load_chart(bundled_chart_path())
    names = sorted(FOCI)
    foci = np.array([FOCI[n] for n in names])
    lines = [
        "# Curated reference naming for the bundled chart: nearest focal",
        "# colour in Lab, with hand-reviewed boundary chips overridden",
        "# (see scripts/make_chart_reference.py).",
        "row,column,term",
    ]
    for chip in chart.chips:
        key = (chip.row, chip.column)
        if key in OVERRIDES:
            term = OVERRIDES[key]
        else:
            d = np.linalg.norm(foci - np.array(chip.lab), axis=1)
            term = names[int(np.argmin(d))]
        lines.append(f"{chip.row},{chip.column},{term}")
    OUT.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {len(chart.chips)} reference labels to {OUT}")


if __name__ == "__main__":
    main()
