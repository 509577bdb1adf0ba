"""Evaluation protocols: chart naming accuracy and per-image true
positive ratio on mask-labelled datasets.

The colour chart is the classic naming stimulus: 320 chromatic chips in
8 lightness rows by 40 hue columns, plus a 10-step achromatic column.
Dataset scoring averages per-image ratios so small images carry the same
weight as large ones.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import LabelledImage, discover_dataset
from .errors import DataError
from .images import load_image, load_mask
from .model import ColourModel, name_image, name_points
from .resources import model_palette

N_CHIPS = 330
N_ACHROMATIC = 10

ACHROMATIC_SANITY_LIMIT = 2.0


@dataclass(frozen=True)
class MunsellChip:
    notation: str
    lab: tuple[float, float, float]
    row: int
    column: int

    @property
    def is_achromatic(self) -> bool:
        return self.column == 0


@dataclass(frozen=True)
class MunsellChart:
    """The 330-chip naming chart; chip positions are unique grid cells
    with the achromatic column at column 0."""

    chips: tuple[MunsellChip, ...]

    def __post_init__(self):
        object.__setattr__(self, "chips", tuple(self.chips))
        if len(self.chips) != N_CHIPS:
            raise DataError(f"chart must have {N_CHIPS} chips, got {len(self.chips)}")
        achromatic = sum(c.is_achromatic for c in self.chips)
        if achromatic != N_ACHROMATIC:
            raise DataError(
                f"chart must have {N_ACHROMATIC} achromatic chips, got {achromatic}"
            )
        positions = [(c.row, c.column) for c in self.chips]
        if len(set(positions)) != len(positions):
            raise DataError("chart has duplicate chip positions")

    @property
    def n_rows(self) -> int:
        return max(c.row for c in self.chips) + 1

    @property
    def n_columns(self) -> int:
        return max(c.column for c in self.chips) + 1

    def lab_array(self) -> np.ndarray:
        return np.array([c.lab for c in self.chips])


def load_chart(path) -> MunsellChart:
    """Read a chart from CSV (columns notation, L, a, b, row, column;
    ``#`` lines are comments)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such chart file")
    chips = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(ln for ln in f if not ln.startswith("#"))
        required = {"notation", "L", "a", "b", "row", "column"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise DataError(f"{path}: chart header must contain {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            try:
                chips.append(
                    MunsellChip(
                        notation=row["notation"],
                        lab=(float(row["L"]), float(row["a"]), float(row["b"])),
                        row=int(row["row"]),
                        column=int(row["column"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}: unparsable chart row {i}: {exc}") from exc
    chart = MunsellChart(tuple(chips))
    worst = max(
        max(abs(c.lab[1]), abs(c.lab[2])) for c in chart.chips if c.is_achromatic
    )
    if worst >= ACHROMATIC_SANITY_LIMIT:
        warnings.warn(
            f"{path}: achromatic chips stray {worst:.2f} Lab units off neutral"
        )
    return chart


@dataclass(frozen=True)
class ChartNamingReference:
    """Per-position term labels from an external naming study; chips
    without a label are excluded from scoring."""

    labels: dict[tuple[int, int], str]

    def __post_init__(self):
        object.__setattr__(self, "labels", dict(self.labels))
        if not self.labels:
            raise DataError("reference has no labels")


def load_reference(path) -> ChartNamingReference:
    """Read a reference naming from CSV (columns row, column, term)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such reference file")
    labels: dict[tuple[int, int], str] = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(ln for ln in f if not ln.startswith("#"))
        required = {"row", "column", "term"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise DataError(f"{path}: reference header must contain {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            try:
                key = (int(row["row"]), int(row["column"]))
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}: unparsable reference row {i}: {exc}") from exc
            if key in labels:
                raise DataError(f"{path}: duplicate reference position {key}")
            labels[key] = row["term"]
    return ChartNamingReference(labels)


def reference_from_model(model: ColourModel, chart: MunsellChart) -> ChartNamingReference:
    """The model's own chart naming as a reference (self-consistency)."""
    names = chart_naming(model, chart)
    return ChartNamingReference(
        {(c.row, c.column): n for c, n in zip(chart.chips, names)}
    )


def chart_naming(model: ColourModel, chart: MunsellChart) -> list[str]:
    """Term name per chip, in chart chip order."""
    idx = name_points(model, chart.lab_array())
    return [model.terms[i].name for i in idx]


@dataclass(frozen=True)
class ChipResult:
    chip: MunsellChip
    predicted: str
    expected: str | None

    @property
    def matched(self) -> bool | None:
        return None if self.expected is None else self.predicted == self.expected


@dataclass(frozen=True)
class ChartEvaluation:
    results: tuple[ChipResult, ...]

    @property
    def n_labelled(self) -> int:
        return sum(r.expected is not None for r in self.results)

    @property
    def n_matched(self) -> int:
        return sum(bool(r.matched) for r in self.results)

    @property
    def accuracy(self) -> float:
        return self.n_matched / self.n_labelled

    def confusion(self) -> dict[tuple[str, str], int]:
        """Counts keyed by (expected, predicted), labelled chips only."""
        counts: dict[tuple[str, str], int] = {}
        for r in self.results:
            if r.expected is not None:
                key = (r.expected, r.predicted)
                counts[key] = counts.get(key, 0) + 1
        return counts

    def mismatches(self) -> list[ChipResult]:
        return [r for r in self.results if r.matched is False]


def evaluate_chart(
    model: ColourModel, chart: MunsellChart, reference: ChartNamingReference
) -> ChartEvaluation:
    """Name every chip and score agreement with the reference labels."""
    unknown = set(reference.labels.values()) - set(model.term_names)
    if unknown:
        raise DataError(f"reference labels not in model: {sorted(unknown)}")
    predicted = chart_naming(model, chart)
    results = tuple(
        ChipResult(chip, pred, reference.labels.get((chip.row, chip.column)))
        for chip, pred in zip(chart.chips, predicted)
    )
    return ChartEvaluation(results)


def render_chart_segmentation(
    model: ColourModel,
    chart: MunsellChart,
    cell_size: int = 20,
    background: tuple[int, int, int] = (235, 235, 235),
) -> np.ndarray:
    """Render the chart with each chip cell filled by its assigned term's
    display colour. Output is (rows * cell, columns * cell, 3) uint8 with
    the achromatic column at the left."""
    names = chart_naming(model, chart)
    palette = dict(zip(model.term_names, model_palette(model)))
    img = np.full(
        (chart.n_rows * cell_size, chart.n_columns * cell_size, 3),
        background,
        dtype=np.uint8,
    )
    for chip, name in zip(chart.chips, names):
        r0, c0 = chip.row * cell_size, chip.column * cell_size
        img[r0 : r0 + cell_size, c0 : c0 + cell_size] = palette[name]
    return img


# ---------------------------------------------------------------------------
# Dataset protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImageResult:
    path: Path
    term: str
    n_pixels: int
    ratio: float


@dataclass(frozen=True)
class DatasetReport:
    per_image: tuple[ImageResult, ...]
    errors: tuple[tuple[Path, str], ...] = ()

    @property
    def mean_tpr(self) -> float:
        """Unweighted mean of per-image ratios (image size plays no role)."""
        return float(np.mean([r.ratio for r in self.per_image]))

    def per_term(self) -> dict[str, float]:
        by_term: dict[str, list[float]] = {}
        for r in self.per_image:
            by_term.setdefault(r.term, []).append(r.ratio)
        return {t: float(np.mean(v)) for t, v in sorted(by_term.items())}


def _score_item(model: ColourModel, item: LabelledImage) -> ImageResult:
    if item.term not in model.term_names:
        raise DataError(f"{item.path}: term {item.term!r} not in model")
    image = load_image(item.path)
    if item.mask_path is not None:
        mask = load_mask(item.mask_path)
        if mask.shape != image.shape[:2]:
            raise DataError(
                f"{item.mask_path}: mask shape {mask.shape} does not match "
                f"image {image.shape[:2]}"
            )
    else:
        mask = np.ones(image.shape[:2], dtype=bool)
    if not mask.any():
        raise DataError(f"{item.path}: empty mask")
    labels = name_image(model, image)
    target = model.index(item.term)
    ratio = float(np.mean(labels[mask] == target))
    return ImageResult(item.path, item.term, int(mask.sum()), ratio)


def true_positive_ratio(model: ColourModel, item: LabelledImage) -> float:
    """Fraction of the item's masked pixels named with the item's term."""
    return _score_item(model, item).ratio


def evaluate_dataset(
    model: ColourModel, items, *, allow_errors: bool = False
) -> DatasetReport:
    """Score every item and average per-image ratios.

    Failing items are recorded and excluded from the mean; unless
    ``allow_errors`` is set, any failure aborts with an error after the
    full pass (so the message lists every bad item).
    """
    items = list(items)
    if not items:
        raise DataError("no dataset items to evaluate")
    results = []
    errors = []
    for item in items:
        try:
            results.append(_score_item(model, item))
        except DataError as exc:
            errors.append((item.path, str(exc)))
    if errors and not allow_errors:
        listing = "; ".join(f"{p}: {m}" for p, m in errors)
        raise DataError(f"{len(errors)} dataset item(s) failed: {listing}")
    if not results:
        raise DataError("every dataset item failed")
    return DatasetReport(tuple(results), tuple(errors))


def evaluate_dataset_dir(
    model: ColourModel, root, *, allow_errors: bool = False
) -> DatasetReport:
    """Evaluate a dataset directory in the standard layout."""
    return evaluate_dataset(model, discover_dataset(root), allow_errors=allow_errors)
