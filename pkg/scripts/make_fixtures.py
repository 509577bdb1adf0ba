#!/usr/bin/env python3
"""Regenerate the bundled test fixtures.

Everything is synthesised deterministically (fixed seeds) around the
focal Lab colours below:

  * tests/fixtures/focal_corpus/ - 11 terms x 5 images of Gaussian Lab
    noise (sigma 2) around each focus; the red and white images carry
    partial masks over a grey surround to exercise the mask path.
  * tests/fixtures/cream/ - two masked training images for the extra
    "cream" term plus an unmasked held-out cream patch.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

import shutil
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chromaterm.colourspace import lab_to_srgb
from chromaterm.images import save_rgb_png

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

NOISE_SIGMA = 2.0
IMAGE_SIZE = 48
IMAGES_PER_TERM = 5
MASKED_TERMS = ("red", "white")

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

CREAM_FOCUS = (84.0, 3.0, 20.0)
GREY_FILL = (53.0, 0.0, 0.0)


def lab_noise(rng, focus, shape):
    """Gaussian Lab noise around the focus, resampled into the sRGB
    gamut (displayable images cannot carry out-of-gamut pixels)."""
    lab = np.empty(shape + (3,))
    lab[:] = focus
    lab = lab + rng.normal(0.0, NOISE_SIGMA, size=lab.shape)
    flat = lab.reshape(-1, 3)
    for _ in range(50):
        _, oog = lab_to_srgb(flat, return_oog=True)
        if not oog.any():
            break
        flat[oog] = np.asarray(focus) + rng.normal(0.0, NOISE_SIGMA, size=(int(oog.sum()), 3))
    return lab


def to_png(lab, path):
    rgb, oog = lab_to_srgb(lab, return_oog=True)
    frac = float(oog.mean())
    if frac > 0.001:
        raise RuntimeError(f"{path}: {frac:.1%} of pixels out of gamut")
    save_rgb_png(np.round(rgb * 255.0).astype(np.uint8), path)


def make_focal_corpus():
    root = FIXTURES / "focal_corpus"
    if root.exists():
        shutil.rmtree(root)
    for t, (term, focus) in enumerate(sorted(FOCI.items())):
        rng = np.random.default_rng(1000 + t)
        term_dir = root / term
        for i in range(IMAGES_PER_TERM):
            name = f"{term}_{i:02d}.png"
            if term in MASKED_TERMS:
                # labelled patch over an unlabelled grey surround
                lab = lab_noise(rng, GREY_FILL, (IMAGE_SIZE, IMAGE_SIZE))
                mask = np.zeros((IMAGE_SIZE, IMAGE_SIZE), dtype=bool)
                lo, hi = IMAGE_SIZE // 4, 3 * IMAGE_SIZE // 4
                mask[lo:hi, lo:hi] = True
                lab[mask] = lab_noise(rng, focus, (int(mask.sum()),))
                to_png(lab, term_dir / name)
                save_rgb_png(
                    np.repeat((mask * 255).astype(np.uint8)[:, :, None], 3, axis=2),
                    term_dir / "masks" / name,
                )
            else:
                lab = lab_noise(rng, focus, (IMAGE_SIZE, IMAGE_SIZE))
                to_png(lab, term_dir / name)
    print(f"wrote focal corpus to {root}")


def make_cream_fixtures():
    root = FIXTURES / "cream"
    if root.exists():
        shutil.rmtree(root)
    rng = np.random.default_rng(4242)
    for i in range(2):
        name = f"cream_{i}.png"
        lab = lab_noise(rng, GREY_FILL, (40, 40))
        mask = np.zeros((40, 40), dtype=bool)
        mask[8:32, 8:32] = True
        lab[mask] = lab_noise(rng, CREAM_FOCUS, (int(mask.sum()),))
        to_png(lab, root / name)
        save_rgb_png(
            np.repeat((mask * 255).astype(np.uint8)[:, :, None], 3, axis=2),
            root / "masks" / name,
        )
    holdout = lab_noise(rng, CREAM_FOCUS, (16, 16))
    to_png(holdout, root / "cream_holdout.png")
    print(f"wrote cream fixtures to {root}")


if __name__ == "__main__":
    make_focal_corpus()
    make_cream_fixtures()
