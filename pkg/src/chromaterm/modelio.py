"""Model files: a versioned JSON document with a fixed key order.

Write -> read -> write reproduces the file byte for byte (floats are
serialised with shortest round-trip repr), so models can serve as golden
files in tests and diffs stay readable.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import DataError
from .images import atomic_path
from .model import (
    COLOUR_SPACE_TAG,
    ROTATION_CONVENTION,
    ColourModel,
    ColourTerm,
    Ellipsoid,
)

FORMAT_VERSION = 1


def model_to_dict(model: ColourModel) -> dict:
    terms = []
    for t in model.terms:
        e = t.ellipsoid
        entry = {
            "name": t.name,
            "centre": list(e.centre),
            "semi_axes": list(e.semi_axes),
            "rotation": list(e.rotation),
            "steepness": t.steepness,
        }
        if e.form_override is not None:
            entry["form_override"] = [list(e.form_override[i : i + 3]) for i in (0, 3, 6)]
        terms.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "colour_space": model.colour_space,
        "rotation_convention": ROTATION_CONVENTION,
        "terms": terms,
    }


def model_from_dict(doc: dict) -> ColourModel:
    if not isinstance(doc, dict):
        raise DataError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format_version {version!r}")
    if doc.get("colour_space") != COLOUR_SPACE_TAG:
        raise DataError(f"unsupported colour space {doc.get('colour_space')!r}")
    convention = doc.get("rotation_convention")
    if convention != ROTATION_CONVENTION:
        raise DataError(f"unknown rotation convention {convention!r}")
    try:
        terms = []
        for entry in doc["terms"]:
            override = entry.get("form_override")
            ellipsoid = Ellipsoid(
                centre=tuple(entry["centre"]),
                semi_axes=tuple(entry["semi_axes"]),
                rotation=tuple(entry["rotation"]),
                form_override=(
                    tuple(v for row in override for v in row)
                    if override is not None
                    else None
                ),
            )
            terms.append(ColourTerm(entry["name"], ellipsoid, entry["steepness"]))
        return ColourModel(tuple(terms))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed model document: {exc}") from exc


def dumps_model(model: ColourModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, allow_nan=False) + "\n"


def write_model(model: ColourModel, path) -> None:
    text = dumps_model(model)
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")


def read_model(path) -> ColourModel:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such model file")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(doc)
