"""Learning colour terms from segmented examples.

Ground truth is built by quantising labelled pixels into Lab bins and
counting how often each bin was labelled with each term. Each term's ten
parameters (centre, semi-axes, rotations, steepness) are then optimised
independently against those membership degrees under box constraints.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .colourspace import D65, WhitePoint, srgb_to_lab
from .errors import DataError, NumericsError
from .model import (
    ColourModel,
    ColourTerm,
    Ellipsoid,
    canonical_term_order,
    model_memberships,
    rotation_matrix,
    term_belongingness,
    _radial_surface,
)


@dataclass(frozen=True)
class FitConfig:
    """Optimiser settings: iteration cap, objective-improvement tolerance,
    Lab bin size for ground truth, and a seed reserved for stochastic
    restarts (the default optimiser is fully deterministic)."""

    max_iterations: int = 1000
    tolerance: float = 1e-3
    bin_size: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.bin_size <= 0:
            raise ValueError("bin_size must be > 0")


@dataclass(frozen=True)
class ParameterBounds:
    """Box constraints: semi-axes positive, angles in [0, pi), steepness
    in (0, 1], centres unbounded. The open ends are closed off by small
    epsilons so the box is numerically workable."""

    axis_min: float = 0.1
    angle_max: float = math.pi - 1e-9
    steepness_min: float = 1e-6
    steepness_max: float = 1.0

    def as_scipy(self) -> list[tuple[float | None, float | None]]:
        return (
            [(None, None)] * 3
            + [(self.axis_min, None)] * 3
            + [(0.0, self.angle_max)] * 3
            + [(self.steepness_min, self.steepness_max)]
        )

    def clip(self, params: np.ndarray) -> np.ndarray:
        lo = np.array([-np.inf] * 3 + [self.axis_min] * 3 + [0.0] * 3 + [self.steepness_min])
        hi = np.array([np.inf] * 6 + [self.angle_max] * 3 + [self.steepness_max])
        return np.clip(params, lo, hi)


@dataclass(frozen=True, eq=False)
class MembershipGroundTruth:
    """Sparse fitting target: Lab bin centres with per-term membership
    degrees in [0, 1]. Memberships from counting sum to 1 over the terms
    observed in a bin; sampled or averaged ground truths need not."""

    points: np.ndarray
    memberships: np.ndarray
    bin_size: float
    term_names: tuple[str, ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        mem = np.asarray(self.memberships, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be (N, 3), got {pts.shape}")
        if mem.shape != (pts.shape[0], len(self.term_names)):
            raise ValueError(
                f"memberships shape {mem.shape} does not match "
                f"{pts.shape[0]} bins x {len(self.term_names)} terms"
            )
        if mem.size and (mem.min() < 0.0 or mem.max() > 1.0):
            raise ValueError("memberships must lie in [0, 1]")
        if self.bin_size <= 0:
            raise ValueError("bin_size must be > 0")
        pts.setflags(write=False)
        mem.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "memberships", mem)
        object.__setattr__(self, "term_names", tuple(self.term_names))

    @property
    def n_bins(self) -> int:
        return self.points.shape[0]

    def term_index(self, name: str) -> int:
        try:
            return self.term_names.index(name)
        except ValueError:
            raise DataError(f"term {name!r} not in ground truth {self.term_names}") from None

    def support(self, name: str) -> np.ndarray:
        """Boolean mask of bins with nonzero membership for the term."""
        return self.memberships[:, self.term_index(name)] > 0.0


@dataclass
class LabelledExample:
    """One segmented training image: pixels under the mask (or the whole
    image when the mask is None) are labelled with a single term."""

    image: np.ndarray
    term: str
    mask: np.ndarray | None = None


def quantise_lab(lab: np.ndarray, bin_size: float) -> np.ndarray:
    """Integer bin indices of Lab points under uniform cubic binning."""
    return np.floor(np.asarray(lab, dtype=np.float64) / bin_size).astype(np.int64)


def bin_centre(index, bin_size: float) -> np.ndarray:
    return (np.asarray(index, dtype=np.float64) + 0.5) * bin_size


def build_ground_truth(
    examples,
    bin_size: float = 1.0,
    term_names=None,
    white_point: WhitePoint = D65,
) -> MembershipGroundTruth:
    """Count labelled pixel occurrences per Lab bin.

    Each bin's membership for a term is the fraction of that bin's
    labelled occurrences carrying the term. Examples with an empty mask
    are skipped with a warning; no labelled pixels at all is an error.
    """
    examples = list(examples)
    if not examples:
        raise DataError("no examples given")
    if term_names is None:
        names = canonical_term_order({ex.term for ex in examples})
    else:
        names = tuple(term_names)
        unknown = {ex.term for ex in examples} - set(names)
        if unknown:
            raise DataError(f"examples carry terms not in term_names: {sorted(unknown)}")
    index_of = {n: i for i, n in enumerate(names)}

    counts: dict[tuple[int, int, int], np.ndarray] = {}
    total = 0
    for ex in examples:
        image = np.asarray(ex.image)
        if ex.mask is None:
            pixels = image.reshape(-1, image.shape[-1])
        else:
            mask = np.asarray(ex.mask, dtype=bool)
            if mask.shape != image.shape[:2]:
                raise DataError(
                    f"mask shape {mask.shape} does not match image {image.shape[:2]}"
                )
            if not mask.any():
                warnings.warn(f"empty mask in example for term {ex.term!r}; skipped")
                continue
            pixels = image[mask]
        lab = srgb_to_lab(pixels, white_point)
        idx = quantise_lab(lab, bin_size)
        uniq, n = np.unique(idx, axis=0, return_counts=True)
        t = index_of[ex.term]
        for key, k in zip(map(tuple, uniq), n):
            row = counts.get(key)
            if row is None:
                row = counts[key] = np.zeros(len(names))
            row[t] += k
        total += len(lab)
    if total == 0:
        raise DataError("no labelled pixels in any example")

    keys = sorted(counts)
    points = bin_centre(np.array(keys, dtype=np.int64), bin_size)
    raw = np.stack([counts[k] for k in keys])
    memberships = raw / raw.sum(axis=1, keepdims=True)
    return MembershipGroundTruth(points, memberships, bin_size, names)


def average_ground_truths(
    gt1: MembershipGroundTruth, gt2: MembershipGroundTruth, weight: float
) -> MembershipGroundTruth:
    """Per-bin convex combination weight*gt1 + (1-weight)*gt2.

    Bins present in only one input are combined against zeros for the
    other. Term sets and bin sizes must match.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight}")
    s1, s2 = set(gt1.term_names), set(gt2.term_names)
    if s1 != s2:
        raise DataError(
            f"term sets differ: only in first {sorted(s1 - s2)}, "
            f"only in second {sorted(s2 - s1)}"
        )
    if gt1.bin_size != gt2.bin_size:
        raise DataError(f"bin sizes differ: {gt1.bin_size} vs {gt2.bin_size}")
    perm = [gt2.term_index(n) for n in gt1.term_names]

    def keyed(gt, cols):
        m = gt.memberships[:, cols] if cols is not None else gt.memberships
        return {tuple(np.round(p, 9)): m[i] for i, p in enumerate(gt.points)}

    d1 = keyed(gt1, None)
    d2 = keyed(gt2, perm)
    zeros = np.zeros(len(gt1.term_names))
    keys = sorted(set(d1) | set(d2))
    points = np.array(keys)
    memberships = np.stack(
        [weight * d1.get(k, zeros) + (1.0 - weight) * d2.get(k, zeros) for k in keys]
    )
    return MembershipGroundTruth(points, memberships, gt1.bin_size, gt1.term_names)


def ground_truth_from_model(
    model: ColourModel, points, bin_size: float = 1.0
) -> MembershipGroundTruth:
    """Sample a model's membership functions at the given Lab points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return MembershipGroundTruth(
        pts, model_memberships(model, pts), bin_size, model.term_names
    )


def initialise_term(name: str, gt: MembershipGroundTruth) -> ColourTerm:
    """Starting point for optimisation: a sphere of semi-axis 10 centred
    on the mean of the term's supporting bins, unrotated, steepness 1."""
    sup = gt.support(name)
    if not sup.any():
        raise DataError(f"term {name!r} has no supporting bins in the ground truth")
    centre = gt.points[sup].mean(axis=0)
    return ColourTerm(name, Ellipsoid(tuple(centre), (10.0, 10.0, 10.0)), steepness=1.0)


def fit_objective(
    term: ColourTerm, gt: MembershipGroundTruth, term_index: int | None = None
) -> float:
    """Sum of squared membership residuals over all ground-truth bins."""
    t = gt.term_index(term.name) if term_index is None else term_index
    residuals = term_belongingness(term, gt.points) - gt.memberships[:, t]
    return float(residuals @ residuals)


def _pack(term: ColourTerm) -> np.ndarray:
    e = term.ellipsoid
    return np.array([*e.centre, *e.semi_axes, *e.rotation, term.steepness])


def _unpack(name: str, params: np.ndarray) -> ColourTerm:
    return ColourTerm(
        name,
        Ellipsoid(tuple(params[0:3]), tuple(params[3:6]), tuple(params[6:9])),
        steepness=float(params[9]),
    )


def _objective_fn(points: np.ndarray, targets: np.ndarray):
    def objective(params: np.ndarray) -> float:
        axes = params[3:6]
        r_mat = rotation_matrix(params[6:9])
        form = r_mat @ np.diag(1.0 / np.square(axes)) @ r_mat.T
        r, h = _radial_surface(points, params[0:3], form, float(axes.mean()))
        b = 1.0 / (1.0 + np.exp(np.clip(params[9] * (r - h), -700.0, 700.0)))
        residuals = b - targets
        return float(residuals @ residuals)

    return objective


def _moment_start(
    points: np.ndarray, weights: np.ndarray, bounds: ParameterBounds
) -> np.ndarray:
    """Second deterministic starting point: membership-weighted mean and
    covariance-derived semi-axes. Ground truths whose memberships never
    reach exactly zero park the standard initialisation on the bin
    centroid, which can be a poor basin; the moment start recovers it."""
    total = weights.sum()
    mu = (weights[:, None] * points).sum(axis=0) / total
    d = points - mu
    cov = np.einsum("n,ni,nj->ij", weights, d, d) / total
    # a uniformly filled ellipsoid has covariance diag(axes^2) / 5
    eig = np.sort(np.linalg.eigvalsh(cov))[::-1]
    axes = np.sqrt(np.maximum(eig, 0.0) * 5.0)
    axes = np.clip(axes, max(0.5, bounds.axis_min), None)
    return np.array([*mu, *axes, 0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class TermFit:
    """A fitted term plus optimisation diagnostics. ``fell_back`` marks a
    fit that could not improve on the initial point and returned it."""

    term: ColourTerm
    initial_objective: float
    final_objective: float
    n_iterations: int
    converged: bool
    fell_back: bool
    message: str = ""


def fit_term(
    name: str,
    gt: MembershipGroundTruth,
    config: FitConfig | None = None,
    bounds: ParameterBounds | None = None,
) -> TermFit:
    """Optimise one term's ten parameters against the ground truth.

    Sequential quadratic programming under the box constraints, run from
    the standard initialisation and from a moment-based second start; the
    lower final objective wins (ties favour the standard start). Fully
    deterministic. If neither run improves on the standard initial point,
    that initial term is returned with ``fell_back`` set rather than
    raising.
    """
    config = config or FitConfig()
    bounds = bounds or ParameterBounds()
    init = initialise_term(name, gt)
    t = gt.term_index(name)
    targets = gt.memberships[:, t]
    objective = _objective_fn(gt.points, targets)
    x0 = _pack(init)
    f0 = objective(x0)
    if not math.isfinite(f0):
        raise NumericsError(f"initial objective for term {name!r} is not finite")

    def run(start: np.ndarray):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = minimize(
                objective,
                start,
                method="SLSQP",
                bounds=bounds.as_scipy(),
                options={"maxiter": config.max_iterations, "ftol": config.tolerance},
            )
        x = bounds.clip(np.asarray(result.x, dtype=np.float64))
        return x, objective(x), result

    x, f1, result = run(x0)
    x_alt, f_alt, result_alt = run(_moment_start(gt.points, targets, bounds))
    if math.isfinite(f_alt) and f_alt < f1:
        x, f1, result = x_alt, f_alt, result_alt

    if not math.isfinite(f1) or f1 > f0:
        return TermFit(
            term=init,
            initial_objective=f0,
            final_objective=f0,
            n_iterations=int(result.nit),
            converged=False,
            fell_back=True,
            message=f"optimiser failed to improve on the initial point: {result.message}",
        )
    return TermFit(
        term=_unpack(name, x),
        initial_objective=f0,
        final_objective=f1,
        n_iterations=int(result.nit),
        converged=bool(result.success),
        fell_back=False,
        message=str(result.message),
    )


@dataclass(frozen=True)
class ModelFit:
    """A fitted model plus per-term diagnostics in model order."""

    model: ColourModel
    fits: tuple[TermFit, ...]

    def fit_for(self, name: str) -> TermFit:
        return self.fits[self.model.index(name)]


def fit_model(
    term_names,
    gt: MembershipGroundTruth,
    config: FitConfig | None = None,
    bounds: ParameterBounds | None = None,
) -> ModelFit:
    """Fit every named term independently and assemble a model in
    canonical (alphabetical) order."""
    names = canonical_term_order(term_names)
    if not names:
        raise DataError("no term names given")
    fits = []
    for name in names:
        try:
            fits.append(fit_term(name, gt, config, bounds))
        except DataError as exc:
            raise DataError(f"fitting term {name!r}: {exc}") from exc
    model = ColourModel(tuple(f.term for f in fits))
    return ModelFit(model=model, fits=tuple(fits))


def extend_model(
    model: ColourModel,
    name: str,
    examples,
    config: FitConfig | None = None,
    bounds: ParameterBounds | None = None,
) -> ColourModel:
    """Learn one additional term from a few examples and append it.

    The new term's ground truth comes from the examples alone; existing
    terms are untouched, and the new term ranks last for tie-breaking.
    """
    config = config or FitConfig()
    if name in model.term_names:
        raise DataError(f"model already has a term named {name!r}")
    examples = list(examples)
    if not examples:
        raise DataError("no example images given")
    for ex in examples:
        if ex.term != name:
            raise DataError(
                f"extension example labelled {ex.term!r}, expected {name!r}"
            )
    gt = build_ground_truth(examples, config.bin_size, term_names=(name,))
    fit = fit_term(name, gt, config, bounds)
    return ColourModel(model.terms + (fit.term,), model.colour_space)
