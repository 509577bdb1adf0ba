#!/usr/bin/env python3
"""Regenerate the bundled 330-chip colour chart table.

Layout mirrors the classic naming stimulus: a 10-step achromatic column
(column 0) and 8 lightness rows by 40 hue columns of chromatic chips.
Chip coordinates are synthesised, not measured:

  * lightness rows follow the ASTM D1535 value-to-luminance quintic,
  * the 40 hue columns are evenly spaced in CIELAB hue angle,
  * each chromatic chip sits just inside the sRGB gamut boundary at the
    maximum chroma for its (hue angle, lightness) cell.

Run from the repository root:  python3 scripts/make_munsell_chip_table.py
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chromaterm.colourspace import lab_to_srgb

OUT = Path(__file__).resolve().parents[1] / "src" / "chromaterm" / "data" / "munsell_chips.csv"

HUE_FAMILIES = ["R", "YR", "Y", "GY", "G", "BG", "B", "PB", "P", "RP"]
HUE_STEPS = ["2.5", "5", "7.5", "10"]
HUE_TOKENS = [step + fam for fam in HUE_FAMILIES for step in HUE_STEPS]

# CIELAB hue angle of the first column (2.5R); columns advance by 9 degrees.
HUE_ANGLE_ORIGIN = 20.0

NEUTRAL_VALUES = [9.5, 9, 8, 7, 6, 5, 4, 3, 2, 1.5]
CHROMATIC_VALUES = [9, 8, 7, 6, 5, 4, 3, 2]  # rows 1..8

GAMUT_MARGIN = 0.25


def value_to_lightness(v: float) -> float:
    """Munsell value -> L* via the ASTM D1535 quintic for Y (in %)."""
    y = (
        1.1914 * v
        - 0.22533 * v**2
        + 0.23352 * v**3
        - 0.020484 * v**4
        + 0.00081939 * v**5
    )
    t = y / 100.0
    delta = 6.0 / 29.0
    f = t ** (1.0 / 3.0) if t > delta**3 else t / (3 * delta**2) + 4.0 / 29.0
    return 116.0 * f - 16.0


def in_gamut(lab) -> bool:
    _, oog = lab_to_srgb(np.asarray(lab, dtype=float), return_oog=True)
    return not bool(oog)


def max_gamut_chroma(lightness: float, hue_deg: float) -> float:
    """Largest chroma at the given lightness and hue angle that stays
    inside sRGB, to GAMUT_MARGIN precision."""
    h = np.radians(hue_deg)
    direction = np.array([0.0, np.cos(h), np.sin(h)])

    def candidate(c):
        return np.array([lightness, 0.0, 0.0]) + c * direction

    lo, hi = 0.0, 200.0
    if not in_gamut(candidate(lo)):
        raise RuntimeError(f"neutral point out of gamut at L={lightness}")
    while hi - lo > GAMUT_MARGIN / 4:
        mid = 0.5 * (lo + hi)
        if in_gamut(candidate(mid)):
            lo = mid
        else:
            hi = mid
    return max(lo - GAMUT_MARGIN, 0.0)


def main() -> None:
    rows = []
    for r, v in enumerate(NEUTRAL_VALUES):
        lightness = value_to_lightness(v)
        notation = f"N{v:g}"
        rows.append((notation, lightness, 0.0, 0.0, r, 0))
    for r, v in enumerate(CHROMATIC_VALUES, start=1):
        lightness = value_to_lightness(v)
        for i, token in enumerate(HUE_TOKENS):
            hue = HUE_ANGLE_ORIGIN + 9.0 * i
            chroma = max_gamut_chroma(lightness, hue)
            a = chroma * np.cos(np.radians(hue))
            b = chroma * np.sin(np.radians(hue))
            notation = f"{token} {v}/{chroma:.1f}"
            rows.append((notation, lightness, a, b, r, i + 1))

    lines = [
        "# Synthetic 330-chip naming chart (320 chromatic + 10 achromatic).",
        "# Lightness rows: ASTM D1535 value quintic; hue columns: 40 CIELAB",
        f"# hue angles at 9 degree steps from {HUE_ANGLE_ORIGIN:g} degrees; chroma: maximum",
        "# in-sRGB-gamut chroma per cell (D65). Not Munsell renotation data;",
        "# chip notations are positional labels in that style.",
        "# Regenerate with scripts/make_munsell_chip_table.py.",
        "notation,L,a,b,row,column",
    ]
    for notation, L, a, b, r, c in rows:
        lines.append(f"{notation},{L:.4f},{a:.4f},{b:.4f},{r},{c}")
    OUT.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {len(rows)} chips to {OUT}")


if __name__ == "__main__":
    main()
