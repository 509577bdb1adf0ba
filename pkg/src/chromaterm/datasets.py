"""Mask-labelled dataset layout.

A dataset is a directory with one subdirectory per colour term holding
images, plus an optional ``masks/`` sibling of same-named binary masks
(white marks the labelled region). An image without a mask is labelled
whole.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .fitting import LabelledExample
from .images import load_image, load_mask

IMAGE_SUFFIXES = (".png", ".ppm")
MASK_DIR = "masks"


@dataclass(frozen=True)
class LabelledImage:
    """One evaluation unit: an image whose masked region carries a term."""

    path: Path
    term: str
    mask_path: Path | None = None


def discover_dataset(root) -> list[LabelledImage]:
    """Enumerate a dataset directory deterministically (sorted by term,
    then file name)."""
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"{root}: no such dataset directory")
    items: list[LabelledImage] = []
    for term_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        term = term_dir.name
        for img in sorted(term_dir.iterdir()):
            if not img.is_file() or img.suffix.lower() not in IMAGE_SUFFIXES:
                continue
            mask = term_dir / MASK_DIR / img.name
            items.append(LabelledImage(img, term, mask if mask.is_file() else None))
    if not items:
        raise DataError(f"{root}: dataset contains no images")
    return items


def load_example(item: LabelledImage) -> LabelledExample:
    """Load a dataset item into memory as a fitting example."""
    image = load_image(item.path)
    mask = load_mask(item.mask_path) if item.mask_path is not None else None
    if mask is not None and mask.shape != image.shape[:2]:
        raise DataError(
            f"{item.mask_path}: mask shape {mask.shape} does not match "
            f"image {image.shape[:2]}"
        )
    return LabelledExample(image=image, term=item.term, mask=mask)


def dataset_terms(items) -> tuple[str, ...]:
    return tuple(sorted({item.term for item in items}))
