"""Ellipsoid membership math and pixel naming."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chromaterm.model import (
    ColourModel,
    ColourTerm,
    Ellipsoid,
    belongingness,
    half_height_distance,
    membership_vector,
    model_memberships,
    name_image,
    name_pixel,
    rotation_matrix,
)

angles_st = st.tuples(
    st.floats(0.0, math.pi - 1e-6),
    st.floats(0.0, math.pi - 1e-6),
    st.floats(0.0, math.pi - 1e-6),
)


def random_ellipsoid(rng) -> Ellipsoid:
    return Ellipsoid(
        centre=tuple(rng.uniform(-60, 110, 3)),
        semi_axes=tuple(rng.uniform(0.5, 40.0, 3)),
        rotation=tuple(rng.uniform(0.0, math.pi - 1e-9, 3)),
    )


def random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


class TestRotationMatrix:
    def test_zero_angles_is_identity(self):
        assert np.allclose(rotation_matrix((0, 0, 0)), np.eye(3))

    def test_quarter_turn_about_lightness_axis(self):
        r = rotation_matrix((math.pi / 2, 0, 0))
        # right-hand rule: unit-a maps onto unit-b
        assert np.allclose(r @ np.array([0.0, 1.0, 0.0]), (0.0, 0.0, 1.0), atol=1e-12)

    @given(angles_st)
    @settings(max_examples=100, deadline=None)
    def test_orthonormal_with_unit_determinant(self, angles):
        r = rotation_matrix(angles)
        assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


class TestHalfHeightDistance:
    def test_semi_axis_along_a(self):
        e = Ellipsoid((0, 0, 0), (2, 3, 4))
        assert half_height_distance(e, (5.0, 0.0, 0.0)) == pytest.approx(2.0)

    def test_closed_form_diagonal_direction(self):
        e = Ellipsoid((0, 0, 0), (1, 2, 7))
        p = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
        h = half_height_distance(e, p)
        assert h == pytest.approx(1 / math.sqrt(0.5 / 1 + 0.5 / 4), abs=1e-12)
        # substituting h*u back into the surface equation gives 1
        u = p / np.linalg.norm(p)
        q = (h * u[0] / 1) ** 2 + (h * u[1] / 2) ** 2 + (h * u[2] / 7) ** 2
        assert q == pytest.approx(1.0, abs=1e-12)

    def test_rotated_surface_point(self):
        e = Ellipsoid((10, -5, 3), (6, 2, 9), (0.7, 1.2, 0.4))
        r = rotation_matrix(e.rotation)
        p = np.array(e.centre) + r @ np.array([6.0, 0.0, 0.0])
        h = half_height_distance(e, p)
        assert h == pytest.approx(6.0, abs=1e-9)
        assert np.linalg.norm(p - e.centre) == pytest.approx(h, abs=1e-9)

    def test_degenerate_centre_returns_mean_axis(self):
        e = Ellipsoid((0, 0, 0), (2, 3, 4))
        assert half_height_distance(e, (0.0, 0.0, 0.0)) == pytest.approx(3.0)
        assert half_height_distance(e, (1e-12, 0.0, 0.0)) == pytest.approx(3.0)

    def test_bounded_by_semi_axes(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            e = random_ellipsoid(rng)
            p = np.array(e.centre) + 30 * random_unit(rng)
            h = half_height_distance(e, p)
            assert min(e.semi_axes) - 1e-9 <= h <= max(e.semi_axes) + 1e-9


class TestBelongingness:
    def test_half_on_surface(self):
        e = Ellipsoid((0, 0, 0), (5, 7, 3))
        term = ColourTerm("x", e, 0.6)
        p = np.array([5.0, 0.0, 0.0])
        assert belongingness(term, p) == pytest.approx(0.5, abs=1e-12)

    def test_scalar_value_against_sigmoid(self):
        # |p-c| - h = 0.5 with g = 1
        e = Ellipsoid((0, 0, 0), (2, 2, 2))
        term = ColourTerm("x", e, 1.0)
        p = np.array([2.5, 0.0, 0.0])
        assert belongingness(term, p) == pytest.approx(1 / (1 + math.exp(0.5)), abs=1e-12)

    def test_saturates_deep_inside(self):
        e = Ellipsoid((0, 0, 0), (55.0, 55.0, 55.0))
        term = ColourTerm("x", e, 1.0)
        # |p-c| - h = -50
        assert belongingness(term, (5.0, 0.0, 0.0)) == pytest.approx(1.0, abs=1e-9)

    def test_interior_exterior_sides(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            e = random_ellipsoid(rng)
            term = ColourTerm("x", e, float(rng.uniform(0.05, 1.0)))
            u = random_unit(rng)
            h = half_height_distance(e, np.array(e.centre) + u)
            for s in (0.0, 0.3, 0.7, 0.999):
                assert belongingness(term, np.array(e.centre) + s * h * u) > 0.5
            for s in (1.001, 1.5, 3.0):
                assert belongingness(term, np.array(e.centre) + s * h * u) < 0.5

    def test_strictly_decreasing_along_rays(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            e = random_ellipsoid(rng)
            term = ColourTerm("x", e, float(rng.uniform(0.1, 1.0)))
            u = random_unit(rng)
            radii = np.linspace(0.1, 60.0, 40)
            values = [belongingness(term, np.array(e.centre) + r * u) for r in radii]
            assert np.all(np.diff(values) < 0)

    def test_rotation_equivariance_world(self):
        # composing a rotation about L and rotating the point the same way
        rng = np.random.default_rng(13)
        for _ in range(30):
            theta, phi, gamma = rng.uniform(0, math.pi / 2, 3)
            delta = rng.uniform(0, math.pi / 2)
            centre = tuple(rng.uniform(-20, 20, 3))
            axes = tuple(rng.uniform(1, 20, 3))
            g = float(rng.uniform(0.1, 1.0))
            t1 = ColourTerm("x", Ellipsoid(centre, axes, (theta, phi, gamma)), g)
            t2 = ColourTerm("x", Ellipsoid(centre, axes, (theta + delta, phi, gamma)), g)
            p = np.array(centre) + 15 * random_unit(rng)
            p2 = np.array(centre) + rotation_matrix((delta, 0, 0)) @ (p - centre)
            assert belongingness(t2, p2) == pytest.approx(
                belongingness(t1, p), abs=1e-9
            )

    def test_rotation_equivariance_frame(self):
        # same frame coordinates under a frame-side rotation about b
        rng = np.random.default_rng(14)
        for _ in range(30):
            theta, phi, gamma = rng.uniform(0, math.pi / 2, 3)
            delta = rng.uniform(0, math.pi / 2)
            centre = tuple(rng.uniform(-20, 20, 3))
            axes = tuple(rng.uniform(1, 20, 3))
            g = float(rng.uniform(0.1, 1.0))
            e1 = Ellipsoid(centre, axes, (theta, phi, gamma))
            e2 = Ellipsoid(centre, axes, (theta, phi, gamma + delta))
            q = 12 * random_unit(rng)
            p1 = np.array(centre) + rotation_matrix(e1.rotation) @ q
            p2 = np.array(centre) + rotation_matrix(e2.rotation) @ q
            t1, t2 = ColourTerm("x", e1, g), ColourTerm("x", e2, g)
            assert belongingness(t2, p2) == pytest.approx(
                belongingness(t1, p1), abs=1e-9
            )

    def test_surface_equation_iff_radial_match(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            e = random_ellipsoid(rng)
            r_mat = rotation_matrix(e.rotation)
            u = random_unit(rng)
            scale = 1 / math.sqrt(sum((u[i] / e.semi_axes[i]) ** 2 for i in range(3)))
            on = np.array(e.centre) + r_mat @ (scale * u)
            off = np.array(e.centre) + r_mat @ (1.3 * scale * u)
            assert np.linalg.norm(on - e.centre) == pytest.approx(
                half_height_distance(e, on), abs=1e-9
            )
            assert np.linalg.norm(off - e.centre) != pytest.approx(
                half_height_distance(e, off), abs=1e-6
            )


class TestNaming:
    def single(self, g=0.5):
        return ColourModel(
            (ColourTerm("only", Ellipsoid((50, 0, 0), (10, 10, 10)), g),)
        )

    def test_membership_vector_single_term_at_centre(self):
        model = self.single(g=0.7)
        v = membership_vector(model, (50.0, 0.0, 0.0))
        assert v.shape == (1,)
        assert v[0] == pytest.approx(1 / (1 + math.exp(-0.7 * 10.0)), abs=1e-12)

    def test_identical_terms_identical_entries(self):
        e = Ellipsoid((50, 0, 0), (10, 12, 8), (0.3, 0.1, 0.9))
        model = ColourModel((ColourTerm("a", e, 0.4), ColourTerm("b", e, 0.4)))
        v = membership_vector(model, (61.0, 3.0, -2.0))
        assert v[0] == v[1]

    def test_memberships_not_normalised(self):
        e1 = Ellipsoid((50, 0, 0), (30, 30, 30))
        e2 = Ellipsoid((52, 0, 0), (30, 30, 30))
        model = ColourModel((ColourTerm("a", e1, 0.5), ColourTerm("b", e2, 0.5)))
        v = membership_vector(model, (51.0, 0.0, 0.0))
        assert v.sum() > 1.5  # both deep inside: independent sigmoids

    def test_single_term_names_everything(self):
        model = self.single()
        for p in [(0, 0, 0), (50, 0, 0), (100, 80, -80)]:
            assert name_pixel(model, p) == "only"

    def test_inside_one_far_from_others(self, two_term_model):
        assert name_pixel(two_term_model, (45.0, 55.0, 33.0)) == "red"
        assert name_pixel(two_term_model, (44.0, 5.0, -38.0)) == "blue"

    def test_exact_tie_takes_earlier_term(self):
        e = Ellipsoid((50, 0, 0), (10, 10, 10))
        model = ColourModel((ColourTerm("first", e, 0.5), ColourTerm("second", e, 0.5)))
        assert name_pixel(model, (70.0, 4.0, 4.0)) == "first"

    def test_argmax_invariant_under_increasing_transforms(self, two_term_model):
        rng = np.random.default_rng(21)
        points = rng.uniform(-20, 100, size=(50, 3))
        b = model_memberships(two_term_model, points)
        base = np.argmax(b, axis=-1)
        for f in (lambda x: 2 * x, np.square, lambda x: np.log(x / (1 - x))):
            assert np.array_equal(np.argmax(f(b), axis=-1), base)


class TestNameImage:
    def test_uniform_image_uniform_labels(self, two_term_model, solid_image_writer, tmp_path):
        from chromaterm.images import load_image

        path = solid_image_writer(tmp_path / "red.png", (45.0, 55.0, 33.0))
        labels = name_image(two_term_model, load_image(path))
        assert np.all(labels == 0)

    def test_maps_match_pointwise_membership(self, two_term_model):
        rng = np.random.default_rng(22)
        image = rng.random((3, 4, 3))
        labels, maps = name_image(two_term_model, image, return_maps=True)
        assert maps.shape == (2, 3, 4)
        from chromaterm.colourspace import srgb_to_lab

        for i in range(3):
            for j in range(4):
                v = membership_vector(two_term_model, srgb_to_lab(image[i, j]))
                assert np.allclose(maps[:, i, j], v)
                assert labels[i, j] == np.argmax(v)

    def test_three_by_three_against_scalar_oracle(self, two_term_model):
        """Plain-python per-pixel oracle: transfer function, Lab formulas
        and the sigmoid written out with math.* only."""
        rng = np.random.default_rng(23)
        image = (rng.random((3, 3, 3)) * 255).astype(np.uint8)

        def oracle_lab(rgb8):
            lin = []
            for v in rgb8:
                c = v / 255.0
                lin.append(c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4)
            m = [
                (0.4124564, 0.3575761, 0.1804375),
                (0.2126729, 0.7151522, 0.0721750),
                (0.0193339, 0.1191920, 0.9503041),
            ]
            xyz = [sum(m[i][j] * lin[j] for j in range(3)) for i in range(3)]
            wp = [sum(row) for row in m]
            d = 6 / 29

            def f(t):
                return t ** (1 / 3) if t > d**3 else t / (3 * d * d) + 4 / 29

            fx, fy, fz = (f(xyz[i] / wp[i]) for i in range(3))
            return (116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz))

        def oracle_name(rgb8):
            lab = oracle_lab(rgb8)
            best, best_b = None, -1.0
            for term in two_term_model.terms:
                e = term.ellipsoid
                d = [lab[i] - e.centre[i] for i in range(3)]
                r = math.sqrt(sum(v * v for v in d))
                u = [v / r for v in d]
                h = 1 / math.sqrt(sum((u[i] / e.semi_axes[i]) ** 2 for i in range(3)))
                b = 1 / (1 + math.exp(term.steepness * (r - h)))
                if b > best_b:
                    best, best_b = term.name, b
            return best

        labels = name_image(two_term_model, image)
        for i in range(3):
            for j in range(3):
                expected = oracle_name(image[i, j])
                assert two_term_model.terms[labels[i, j]].name == expected


class TestValidation:
    def test_rejects_nonpositive_axes(self):
        with pytest.raises(ValueError):
            Ellipsoid((0, 0, 0), (1, 0, 1))

    def test_rejects_angle_out_of_range(self):
        with pytest.raises(ValueError):
            Ellipsoid((0, 0, 0), (1, 1, 1), (0, math.pi, 0))
        with pytest.raises(ValueError):
            Ellipsoid((0, 0, 0), (1, 1, 1), (-0.1, 0, 0))

    def test_rejects_bad_steepness(self):
        e = Ellipsoid((0, 0, 0), (1, 1, 1))
        for g in (0.0, -1.0, 1.5):
            with pytest.raises(ValueError):
                ColourTerm("x", e, g)

    def test_rejects_duplicate_names(self):
        e = Ellipsoid((0, 0, 0), (1, 1, 1))
        with pytest.raises(ValueError):
            ColourModel((ColourTerm("x", e), ColourTerm("x", e)))

    def test_rejects_indefinite_override(self):
        with pytest.raises(ValueError):
            Ellipsoid((0, 0, 0), (1, 1, 1), form_override=(1, 0, 0, 0, -1, 0, 0, 0, 1))
