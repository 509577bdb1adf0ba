"""Ellipsoidal colour categories and fuzzy naming.

A colour category is a rotated ellipsoid in CIELAB plus a sigmoid
steepness. A pixel's membership in a category falls off sigmoidally with
its distance from the ellipsoid centre, crossing 0.5 exactly on the
ellipsoid surface; naming takes the category with the highest membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .colourspace import D65, WhitePoint, srgb_to_lab

# Below this distance from the centre the membership direction is
# undefined; the mean semi-axis stands in for the surface distance.
DEGENERATE_RADIUS = 1e-9

# Fixed order of the eleven basic colour terms (alphabetical); also the
# tie-break order when memberships are exactly equal.
CANONICAL_TERMS = (
    "black",
    "blue",
    "brown",
    "green",
    "grey",
    "orange",
    "pink",
    "purple",
    "red",
    "white",
    "yellow",
)

COLOUR_SPACE_TAG = "CIELab"

# Serialised alongside models so a reader can verify the angle convention.
ROTATION_CONVENTION = "R = R_L(theta) @ R_a(phi) @ R_b(gamma)"


def rotation_matrix(angles: Sequence[float]) -> np.ndarray:
    """Rotation composed about the L*, a*, b* axes, in that fixed order.

    Returns R = R_L(theta) @ R_a(phi) @ R_b(gamma), orthonormal with
    determinant +1. Angles are radians, right-hand rule about each axis.
    """
    theta, phi, gamma = (float(x) for x in angles)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    cg, sg = math.cos(gamma), math.sin(gamma)
    r_l = np.array([[1.0, 0.0, 0.0], [0.0, ct, -st], [0.0, st, ct]])
    r_a = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    r_b = np.array([[cg, -sg, 0.0], [sg, cg, 0.0], [0.0, 0.0, 1.0]])
    return r_l @ r_a @ r_b


def _as_float_triple(value, what: str) -> tuple[float, float, float]:
    t = tuple(float(v) for v in value)
    if len(t) != 3:
        raise ValueError(f"{what} must have 3 components, got {len(t)}")
    if not all(math.isfinite(v) for v in t):
        raise ValueError(f"{what} must be finite, got {t}")
    return t


@dataclass(frozen=True)
class Ellipsoid:
    """A rotated ellipsoid: centre, semi-axes and rotation angles.

    ``form_override``, when present, replaces the quadratic form derived
    from the nine parameters; adaptation stores its stretched (still
    positive-definite) form here while keeping the parametric view.
    """

    centre: tuple[float, float, float]
    semi_axes: tuple[float, float, float]
    rotation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    form_override: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "centre", _as_float_triple(self.centre, "centre"))
        object.__setattr__(self, "semi_axes", _as_float_triple(self.semi_axes, "semi_axes"))
        object.__setattr__(self, "rotation", _as_float_triple(self.rotation, "rotation"))
        if any(a <= 0 for a in self.semi_axes):
            raise ValueError(f"semi-axes must be positive, got {self.semi_axes}")
        if any(not (0.0 <= r < math.pi) for r in self.rotation):
            raise ValueError(f"rotation angles must lie in [0, pi), got {self.rotation}")
        if self.form_override is not None:
            flat = tuple(float(v) for v in self.form_override)
            if len(flat) != 9:
                raise ValueError("form_override must be a row-major 3x3 matrix")
            m = np.array(flat).reshape(3, 3)
            if not np.all(np.isfinite(m)):
                raise ValueError("form_override must be finite")
            if not np.allclose(m, m.T, atol=1e-9):
                raise ValueError("form_override must be symmetric")
            if np.linalg.eigvalsh(m).min() <= 0:
                raise ValueError("form_override must be positive definite")
            object.__setattr__(self, "form_override", flat)

    @cached_property
    def rotation_matrix(self) -> np.ndarray:
        return rotation_matrix(self.rotation)

    @cached_property
    def form(self) -> np.ndarray:
        """Quadratic form M with surface {p : (p-c)' M (p-c) = 1}."""
        if self.form_override is not None:
            m = np.array(self.form_override).reshape(3, 3)
        else:
            r = self.rotation_matrix
            m = r @ np.diag(1.0 / np.square(self.semi_axes)) @ r.T
        m.setflags(write=False)
        return m

    @cached_property
    def mean_semi_axis(self) -> float:
        if self.form_override is None:
            return sum(self.semi_axes) / 3.0
        eig = np.linalg.eigvalsh(np.array(self.form_override).reshape(3, 3))
        return float(np.mean(1.0 / np.sqrt(eig)))

    def with_form(self, form: np.ndarray) -> "Ellipsoid":
        """Copy of this ellipsoid evaluating through the given quadratic form."""
        return replace(self, form_override=tuple(np.asarray(form, float).ravel()))


@dataclass(frozen=True)
class ColourTerm:
    """A named category: an ellipsoid plus the sigmoid steepness g in (0, 1]."""

    name: str
    ellipsoid: Ellipsoid
    steepness: float = 1.0

    def __post_init__(self):
        if not self.name:
            raise ValueError("colour term name must be non-empty")
        g = float(self.steepness)
        if not (0.0 < g <= 1.0) or not math.isfinite(g):
            raise ValueError(f"steepness must lie in (0, 1], got {self.steepness}")
        object.__setattr__(self, "steepness", g)


@dataclass(frozen=True)
class ColourModel:
    """An ordered set of colour terms over one colour space.

    Term order is the deterministic tie-break order for naming.
    """

    terms: tuple[ColourTerm, ...]
    colour_space: str = COLOUR_SPACE_TAG

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a colour model needs at least one term")
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate term names: {sorted(names)}")
        if self.colour_space != COLOUR_SPACE_TAG:
            raise ValueError(f"unsupported colour space {self.colour_space!r}")

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.terms)

    def term(self, name: str) -> ColourTerm:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(name)

    def index(self, name: str) -> int:
        return self.term_names.index(name)


def canonical_term_order(names: Iterable[str]) -> tuple[str, ...]:
    """Deterministic model order: alphabetical (the eleven basic terms
    come out in their conventional listing)."""
    return tuple(sorted(names))


# ---------------------------------------------------------------------------
# Membership evaluation
# ---------------------------------------------------------------------------


def _radial_surface(
    points: np.ndarray, centre: np.ndarray, form: np.ndarray, mean_axis: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per point: radial distance r = |p - c| and the centre-to-surface
    distance h along the direction of p. Points at the centre take the
    mean semi-axis for h."""
    d = points - centre
    r = np.linalg.norm(d, axis=-1)
    safe = r > DEGENERATE_RADIUS
    u = np.zeros_like(d)
    np.divide(d, r[..., None], out=u, where=safe[..., None])
    q = np.einsum("...i,ij,...j->...", u, form, u)
    h = np.full_like(r, mean_axis)
    np.divide(1.0, np.sqrt(q, where=safe, out=np.ones_like(q)), out=h, where=safe)
    return r, h


def _surface_distances(ellipsoid: Ellipsoid, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return _radial_surface(
        points, np.array(ellipsoid.centre), ellipsoid.form, ellipsoid.mean_semi_axis
    )


def half_height_distance(ellipsoid: Ellipsoid, p) -> float:
    """Distance from the ellipsoid centre to its surface, measured along
    the direction from the centre towards ``p``.

    Lies between the smallest and largest semi-axis. For ``p`` closer to
    the centre than ``DEGENERATE_RADIUS`` the direction is undefined and
    the mean semi-axis is returned.
    """
    points = np.asarray(p, dtype=np.float64).reshape(1, 3)
    _, h = _surface_distances(ellipsoid, points)
    return float(h[0])


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(np.clip(x, -700.0, 700.0)))


def term_belongingness(term: ColourTerm, points) -> np.ndarray:
    """Vectorised membership of Lab points (..., 3) in one colour term."""
    pts = np.asarray(points, dtype=np.float64)
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, 3)
    r, h = _surface_distances(term.ellipsoid, pts)
    return _sigmoid(term.steepness * (r - h)).reshape(shape)


def belongingness(term: ColourTerm, p) -> float:
    """Membership of a single Lab point in a colour term.

    Equals 0.5 exactly on the ellipsoid surface, rises towards 1 inside
    and falls towards 0 outside; never attains either bound.
    """
    return float(term_belongingness(term, np.asarray(p, dtype=np.float64).reshape(3)))


def model_memberships(model: ColourModel, points) -> np.ndarray:
    """Memberships of Lab points (..., 3) in every term: shape (..., T).

    Entries are independent sigmoids; they are not normalised to sum to 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, 3)
    out = np.empty((pts.shape[0], len(model.terms)))
    for i, term in enumerate(model.terms):
        out[:, i] = term_belongingness(term, pts)
    return out.reshape(*shape, len(model.terms))


def membership_vector(model: ColourModel, p) -> np.ndarray:
    """Per-term memberships of one Lab point, aligned with model order."""
    return model_memberships(model, np.asarray(p, dtype=np.float64).reshape(3))


def name_points(model: ColourModel, points) -> np.ndarray:
    """Term indices (argmax membership) for Lab points (..., 3).

    Ties go to the lowest term index in model order.
    """
    b = model_memberships(model, points)
    return np.argmax(b, axis=-1)


def name_pixel(model: ColourModel, p) -> str:
    """Colour term name for a single Lab point."""
    idx = int(name_points(model, np.asarray(p, dtype=np.float64).reshape(3)))
    return model.terms[idx].name


def name_image(
    model: ColourModel,
    image,
    white_point: WhitePoint = D65,
    *,
    return_maps: bool = False,
):
    """Name every pixel of an sRGB image.

    Parameters
    ----------
    image : array-like, shape (H, W, 3)
        Integer arrays are read as 8-bit, floats as normalised [0, 1].
    return_maps : bool
        Also return raw per-term membership maps, shape (T, H, W).

    Returns
    -------
    labels : ndarray of int, shape (H, W)
        Per-pixel term index into ``model.terms``.
    maps : ndarray, shape (T, H, W), only with ``return_maps=True``.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {image.shape}")
    h, w = image.shape[:2]
    lab = srgb_to_lab(image, white_point).reshape(-1, 3)
    b = model_memberships(model, lab)
    labels = np.argmax(b, axis=-1).astype(np.int32).reshape(h, w)
    if return_maps:
        maps = np.moveaxis(b.reshape(h, w, len(model.terms)), -1, 0)
        return labels, maps
    return labels
