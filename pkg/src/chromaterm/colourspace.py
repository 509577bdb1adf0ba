"""sRGB <-> CIE L*a*b* conversion.

All model math runs on CIELAB coordinates, so this module is the single
place where device colours enter and leave the colour-opponent space.
Conversions follow IEC 61966-2-1 (sRGB transfer function and primaries)
and the CIE 1976 L*a*b* formulas, computed in double precision.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class WhitePoint(NamedTuple):
    """Reference white in XYZ, Y normalised to 1."""

    X: float
    Y: float
    Z: float


class LabColour(NamedTuple):
    """A point in CIE L*a*b*: lightness plus two opponent axes."""

    L: float
    a: float
    b: float


class SrgbColour(NamedTuple):
    """An sRGB triple, either 8-bit integers or normalised reals."""

    r: float
    g: float
    b: float


# IEC 61966-2-1 sRGB -> XYZ matrix (D65, 2 degree observer).
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

# Defining the white as the matrix row sums makes srgb_to_lab((1,1,1))
# exactly (100, 0, 0) and keeps every grey on the neutral axis.
D65 = WhitePoint(*_RGB_TO_XYZ.sum(axis=1))

_DELTA = 6.0 / 29.0


def _to_float_rgb(rgb) -> np.ndarray:
    """Normalise input to float64 in [0, 1]; integer dtypes are 8-bit."""
    arr = np.asarray(rgb)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected RGB with last dimension 3, got shape {arr.shape}")
    if np.issubdtype(arr.dtype, np.integer):
        return arr.astype(np.float64) / 255.0
    return arr.astype(np.float64)


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c: np.ndarray) -> np.ndarray:
    c = np.clip(c, 0.0, None)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1.0 / 2.4) - 0.055)


def _lab_f(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t)
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t)
    return np.where(t > _DELTA, t**3, 3 * _DELTA**2 * (t - 4.0 / 29.0))


def srgb_to_lab(rgb, white_point: WhitePoint = D65) -> np.ndarray:
    """Convert sRGB to CIE L*a*b*.

    Parameters
    ----------
    rgb : array-like, shape (..., 3)
        Integer values are read as 8-bit (0-255), floats as normalised
        (0-1). 16-bit images should be divided by 65535 before the call
        (the image loader does this).
    white_point : WhitePoint
        Reference white, default D65.

    Returns
    -------
    ndarray, shape (..., 3)
        L in [0, 100] for in-gamut input; a and b unbounded.
    """
    linear = _srgb_to_linear(_to_float_rgb(rgb))
    xyz = linear @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / np.asarray(white_point))
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_srgb(lab, white_point: WhitePoint = D65, *, return_oog: bool = False):
    """Convert CIE L*a*b* back to normalised sRGB in [0, 1].

    Out-of-gamut colours are clipped per channel. With ``return_oog=True``
    also returns a boolean mask (shape without the channel axis) flagging
    pixels whose unclipped linear RGB left [0, 1].
    """
    lab = np.asarray(lab, dtype=np.float64)
    if lab.shape[-1] != 3:
        raise ValueError(f"expected Lab with last dimension 3, got shape {lab.shape}")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    xyz = _lab_f_inv(f) * np.asarray(white_point)
    linear = xyz @ _XYZ_TO_RGB.T
    oog = np.any((linear < -1e-9) | (linear > 1.0 + 1e-9), axis=-1)
    rgb = np.clip(_linear_to_srgb(np.clip(linear, 0.0, 1.0)), 0.0, 1.0)
    if return_oog:
        return rgb, oog
    return rgb


def srgb8_to_lab(rgb8, white_point: WhitePoint = D65) -> np.ndarray:
    """8-bit convenience wrapper; accepts any array-like of 0-255 values."""
    arr = np.asarray(rgb8, dtype=np.float64) / 255.0
    return srgb_to_lab(arr, white_point)


def lab_to_srgb8(lab, white_point: WhitePoint = D65) -> np.ndarray:
    """Convert Lab to rounded 8-bit sRGB (clipping out-of-gamut values)."""
    rgb = lab_to_srgb(lab, white_point)
    return np.round(rgb * 255.0).astype(np.uint8)
