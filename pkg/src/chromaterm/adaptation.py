"""Image-adaptive achromatic categories.

Scenes with a colour cast pull faintly tinted surfaces out of the
achromatic categories. As a counter-measure, the achromatic ellipsoids
are stretched in the a*b* plane towards the image's mean deviation from
neutral grey, growing their reach along the cast direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colourspace import D65, WhitePoint, srgb_to_lab
from .errors import DataError
from .model import ColourModel, ColourTerm

DEFAULT_ACHROMATIC_TERMS = frozenset({"black", "grey", "white"})

# Mean chroma deviations below this (Lab units) are treated as neutral.
NEUTRAL_THRESHOLD = 0.5


@dataclass(frozen=True)
class AdaptationConfig:
    """Which terms count as achromatic, and the stretch gain per Lab unit
    of mean chroma deviation. A gain of 0 disables adaptation."""

    achromatic_terms: frozenset[str] = DEFAULT_ACHROMATIC_TERMS
    gain: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "achromatic_terms", frozenset(self.achromatic_terms))
        if self.gain < 0:
            raise ValueError(f"gain must be >= 0, got {self.gain}")


def mean_chroma_deviation(image, white_point: WhitePoint = D65) -> np.ndarray:
    """Mean (a*, b*) over all pixels; neutral grey sits at (0, 0), so
    this is the image's average deviation from neutral."""
    lab = srgb_to_lab(image, white_point)
    return lab[..., 1:].reshape(-1, 2).mean(axis=0)


def _stretched_form(form: np.ndarray, direction: np.ndarray, factor: float) -> np.ndarray:
    """Grow the ellipsoid's surface distance by ``factor`` along
    ``direction``, leaving directions conjugate to it untouched.

    Rank-one downdate of the quadratic form; the result stays positive
    definite for any factor >= 1 and is never larger than the original
    form, so membership can only grow.
    """
    mw = form @ direction
    denom = float(direction @ mw)
    beta = (1.0 - 1.0 / factor**2) / denom
    return form - beta * np.outer(mw, mw)


def adapt_model(
    model: ColourModel, image, config: AdaptationConfig | None = None
) -> ColourModel:
    """Stretch the achromatic ellipsoids towards the image's colour cast.

    Near-neutral images (mean chroma deviation under half a Lab unit) and
    zero gain return the model unchanged. Chromatic terms are shared with
    the input model, not copied.
    """
    config = config or AdaptationConfig()
    unknown = config.achromatic_terms - set(model.term_names)
    if unknown:
        raise DataError(f"achromatic terms not in model: {sorted(unknown)}")

    deviation = mean_chroma_deviation(image)
    magnitude = float(np.linalg.norm(deviation))
    if magnitude < NEUTRAL_THRESHOLD or config.gain == 0.0:
        return model

    direction = np.array([0.0, deviation[0], deviation[1]]) / magnitude
    factor = 1.0 + config.gain * magnitude
    terms = []
    for term in model.terms:
        if term.name in config.achromatic_terms:
            stretched = _stretched_form(term.ellipsoid.form, direction, factor)
            terms.append(
                ColourTerm(term.name, term.ellipsoid.with_form(stretched), term.steepness)
            )
        else:
            terms.append(term)
    return ColourModel(tuple(terms), model.colour_space)
