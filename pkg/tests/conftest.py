"""Shared fixtures: bundled fixture paths, hand-built models and the
session-scoped model fitted on the focal corpus."""

from pathlib import Path

import numpy as np
import pytest

from chromaterm.colourspace import lab_to_srgb
from chromaterm.datasets import dataset_terms, discover_dataset, load_example
from chromaterm.fitting import FitConfig, build_ground_truth, fit_model
from chromaterm.images import save_rgb_png
from chromaterm.model import ColourModel, ColourTerm, Ellipsoid

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "focal_corpus"


@pytest.fixture(scope="session")
def cream_dir() -> Path:
    return FIXTURES / "cream"


@pytest.fixture(scope="session")
def chart_reference_path() -> Path:
    return FIXTURES / "chart_reference.csv"


@pytest.fixture(scope="session")
def corpus_fit(corpus_dir):
    """Model fitted on the bundled focal corpus, with diagnostics."""
    items = discover_dataset(corpus_dir)
    examples = [load_example(item) for item in items]
    gt = build_ground_truth(examples, 1.0, term_names=dataset_terms(items))
    return fit_model(gt.term_names, gt, FitConfig())


@pytest.fixture(scope="session")
def fitted_model(corpus_fit):
    return corpus_fit.model


@pytest.fixture
def two_term_model() -> ColourModel:
    """Small hand-built model: a dark red and a light blue category."""
    return ColourModel(
        (
            ColourTerm("red", Ellipsoid((45.0, 55.0, 33.0), (12.0, 12.0, 12.0)), 0.8),
            ColourTerm("blue", Ellipsoid((44.0, 5.0, -38.0), (12.0, 12.0, 12.0)), 0.8),
        )
    )


def write_solid_image(path, lab, shape=(8, 8)):
    """Write a uniform sRGB image of the given (in-gamut) Lab colour."""
    block = np.full(shape + (3,), lab, dtype=np.float64)
    rgb, oog = lab_to_srgb(block, return_oog=True)
    assert not oog.any(), f"solid colour {lab} is out of gamut"
    save_rgb_png(np.round(rgb * 255.0).astype(np.uint8), path)
    return path


def write_mask(path, mask):
    save_rgb_png(
        np.repeat((np.asarray(mask, bool) * 255).astype(np.uint8)[:, :, None], 3, axis=2),
        path,
    )
    return path


@pytest.fixture
def solid_image_writer():
    return write_solid_image


@pytest.fixture
def mask_writer():
    return write_mask
