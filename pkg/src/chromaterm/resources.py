"""Bundled data tables: the display palette and the Munsell-style chart."""

from __future__ import annotations

import csv
from functools import lru_cache
from importlib import resources

import numpy as np

from .colourspace import lab_to_srgb8
from .model import ColourModel


def _data_path(name: str):
    return resources.files("chromaterm.data").joinpath(name)


@lru_cache(maxsize=1)
def display_palette() -> dict[str, tuple[int, int, int]]:
    """Representative sRGB display colour per basic colour term."""
    palette = {}
    with _data_path("term_palette.csv").open("r", encoding="utf-8") as f:
        for row in csv.DictReader(filter(lambda ln: not ln.startswith("#"), f)):
            palette[row["term"]] = (int(row["r"]), int(row["g"]), int(row["b"]))
    return palette


def display_colour(name: str, model: ColourModel | None = None) -> tuple[int, int, int]:
    """Display colour for a term: the palette entry when the term is a
    basic one, otherwise the term's own ellipsoid centre rendered to sRGB."""
    palette = display_palette()
    if name in palette:
        return palette[name]
    if model is not None:
        centre = model.term(name).ellipsoid.centre
        return tuple(int(v) for v in lab_to_srgb8(np.array(centre)))
    return (128, 128, 128)


def model_palette(model: ColourModel) -> list[tuple[int, int, int]]:
    """Display colours for every term, in model order."""
    return [display_colour(name, model) for name in model.term_names]


def bundled_chart_path():
    """Path to the bundled 330-chip colour chart table."""
    return _data_path("munsell_chips.csv")
