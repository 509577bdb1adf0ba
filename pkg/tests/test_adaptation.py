"""Achromatic ellipsoid adaptation to image colour casts."""

import math

import numpy as np
import pytest

from chromaterm.adaptation import AdaptationConfig, adapt_model, mean_chroma_deviation
from chromaterm.colourspace import lab_to_srgb
from chromaterm.errors import DataError
from chromaterm.model import (
    ColourModel,
    ColourTerm,
    Ellipsoid,
    belongingness,
    half_height_distance,
    name_pixel,
)


def cast_model() -> ColourModel:
    return ColourModel(
        (
            ColourTerm("black", Ellipsoid((12.0, 0.0, 0.0), (12.0, 10.0, 10.0)), 0.8),
            ColourTerm("green", Ellipsoid((70.0, -30.0, 12.0), (20.0, 18.0, 18.0)), 0.3),
            ColourTerm("grey", Ellipsoid((50.0, 0.0, 0.0), (12.0, 10.0, 10.0)), 0.8),
            ColourTerm("white", Ellipsoid((85.0, 0.0, 0.0), (10.0, 8.0, 8.0)), 0.8),
        )
    )


def green_cast_image():
    return lab_to_srgb(np.full((8, 8, 3), (70.0, -12.0, 4.0)))


class TestMeanChromaDeviation:
    def test_greyscale_image_is_neutral(self):
        grey = np.repeat(np.linspace(0, 1, 12).reshape(3, 4, 1), 3, axis=2)
        dev = mean_chroma_deviation(grey)
        assert np.allclose(dev, (0.0, 0.0), atol=1e-9)

    def test_uniform_offset(self):
        image = lab_to_srgb(np.full((5, 5, 3), (50.0, 5.0, 0.0)))
        dev = mean_chroma_deviation(image)
        assert np.allclose(dev, (5.0, 0.0), atol=1e-6)

    def test_mixed_image_against_loop_oracle(self):
        rng = np.random.default_rng(31)
        image = rng.random((6, 7, 3))
        dev = mean_chroma_deviation(image)
        from chromaterm.colourspace import srgb_to_lab

        total = np.zeros(2)
        for i in range(6):
            for j in range(7):
                lab = srgb_to_lab(image[i, j])
                total += (lab[1], lab[2])
        assert np.allclose(dev, total / 42.0, atol=1e-12)


class TestAdaptModel:
    def test_neutral_image_is_noop(self):
        model = cast_model()
        grey = lab_to_srgb(np.full((4, 4, 3), (60.0, 0.1, -0.1)))
        assert adapt_model(model, grey) is model

    def test_zero_gain_is_noop(self):
        model = cast_model()
        assert adapt_model(model, green_cast_image(), AdaptationConfig(gain=0.0)) is model

    def test_unknown_achromatic_term_rejected(self):
        model = cast_model()
        cfg = AdaptationConfig(achromatic_terms=frozenset({"white", "silver"}))
        with pytest.raises(DataError, match="silver"):
            adapt_model(model, green_cast_image(), cfg)

    def test_chromatic_terms_untouched(self):
        model = cast_model()
        adapted = adapt_model(model, green_cast_image(), AdaptationConfig(gain=0.25))
        assert adapted.term("green") is model.term("green")
        assert adapted.term("white") is not model.term("white")
        assert adapted.term("white").ellipsoid.form_override is not None
        # the parametric view is preserved alongside the stretched form
        assert adapted.term("white").ellipsoid.semi_axes == model.term("white").ellipsoid.semi_axes

    def test_stretch_scales_surface_distance_along_cast(self):
        model = cast_model()
        image = green_cast_image()
        dev = mean_chroma_deviation(image)
        magnitude = float(np.linalg.norm(dev))
        factor = 1.0 + 0.25 * magnitude
        adapted = adapt_model(model, image, AdaptationConfig(gain=0.25))
        w = np.array([0.0, dev[0], dev[1]]) / magnitude
        for name in ("black", "grey", "white"):
            e0 = model.term(name).ellipsoid
            e1 = adapted.term(name).ellipsoid
            p = np.array(e0.centre) + 5.0 * w
            assert half_height_distance(e1, p) == pytest.approx(
                factor * half_height_distance(e0, p), rel=1e-9
            )

    def test_membership_never_shrinks(self):
        # the stretched form is dominated by the original, for any gain
        rng = np.random.default_rng(33)
        for _ in range(40):
            e = Ellipsoid(
                centre=tuple(rng.uniform(20, 80, 3)),
                semi_axes=tuple(rng.uniform(2, 20, 3)),
                rotation=tuple(rng.uniform(0, math.pi - 1e-9, 3)),
            )
            model = ColourModel((ColourTerm("white", e, 0.5),))
            cast = rng.uniform(-15, 15, 2)
            if np.linalg.norm(cast) < 1.0:
                cast = np.array([8.0, -3.0])
            image = lab_to_srgb(
                np.full((2, 2, 3), (60.0, cast[0] / 2, cast[1] / 2))
            )
            gain = float(rng.uniform(0.01, 3.0))
            adapted = adapt_model(
                model, image, AdaptationConfig(achromatic_terms=frozenset({"white"}), gain=gain)
            )
            points = np.array(e.centre) + rng.uniform(-40, 40, size=(30, 3))
            for p in points:
                assert belongingness(adapted.terms[0], p) >= belongingness(
                    model.terms[0], p
                ) - 1e-12

    def test_achromatic_pixels_stay_achromatic(self):
        model = cast_model()
        image = green_cast_image()
        adapted = adapt_model(model, image, AdaptationConfig(gain=0.25))
        rng = np.random.default_rng(34)
        achromatic = {"black", "grey", "white"}
        for _ in range(300):
            p = rng.uniform((0, -25, -25), (100, 25, 25))
            if name_pixel(model, p) in achromatic:
                assert name_pixel(adapted, p) in achromatic

    def test_green_cast_flips_pale_pixel_to_white(self):
        model = cast_model()
        image = green_cast_image()
        dev = mean_chroma_deviation(image)
        w = np.array([0.0, dev[0], dev[1]]) / np.linalg.norm(dev)
        # designated near-neutral pale-green pixel just outside the white
        # ellipsoid along the cast direction
        p = np.array(model.term("white").ellipsoid.centre) + 13.0 * w
        assert name_pixel(model, p) == "green"
        adapted = adapt_model(model, image, AdaptationConfig(gain=0.25))
        assert name_pixel(adapted, p) == "white"

    def test_naming_unchanged_below_threshold(self):
        model = cast_model()
        faint = lab_to_srgb(np.full((4, 4, 3), (60.0, 0.3, 0.2)))  # |dev| < 0.5
        assert adapt_model(model, faint, AdaptationConfig(gain=2.0)) is model


def test_config_validation():
    with pytest.raises(ValueError):
        AdaptationConfig(gain=-0.1)
