"""Image decoding and encoding.

Pixels are exchanged as float64 RGB in [0, 1]. 8-bit sources are divided
by 255 and 16-bit sources by 65535 before any colour math. PNG (8- and
16-bit) and binary PPM (P6) are supported; Pillow handles the common
cases and OpenCV decodes 16-bit PNGs, which Pillow would truncate.
"""

from __future__ import annotations

import os
import struct
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@contextmanager
def atomic_path(path):
    """Write to a temporary sibling and rename into place on success, so
    failures never leave partial output files behind."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _png_bit_depth(path: Path) -> int | None:
    with open(path, "rb") as f:
        head = f.read(25)
    if not head.startswith(_PNG_SIGNATURE) or len(head) < 25:
        return None
    return head[24]


def _read_ppm(path: Path) -> np.ndarray:
    """Binary PPM (P6), 8- or 16-bit big-endian samples."""
    with open(path, "rb") as f:
        data = f.read()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError(f"{path}: truncated PPM header")
        fields.append(data[start:pos])
    if fields[0] != b"P6":
        raise DataError(f"{path}: not a binary PPM (P6) file")
    try:
        width, height, maxval = (int(v) for v in fields[1:])
    except ValueError as exc:
        raise DataError(f"{path}: malformed PPM header") from exc
    if not 0 < maxval < 65536:
        raise DataError(f"{path}: PPM maxval {maxval} out of range")
    pos += 1  # single whitespace after maxval
    dtype = ">u2" if maxval > 255 else "u1"
    expected = width * height * 3
    samples = np.frombuffer(data, dtype=dtype, count=expected, offset=pos)
    if samples.size != expected:
        raise DataError(f"{path}: PPM pixel data truncated")
    return samples.reshape(height, width, 3).astype(np.float64) / maxval


def _read_png16(path: Path) -> np.ndarray:
    import cv2

    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DataError(f"{path}: PNG decode failed")
    if raw.ndim == 2:
        raw = np.repeat(raw[:, :, None], 3, axis=2)
    elif raw.shape[2] >= 3:
        raw = raw[:, :, 2::-1]  # BGR(A) -> RGB
    return raw.astype(np.float64) / 65535.0


def load_image(path) -> np.ndarray:
    """Decode an image file to float64 RGB in [0, 1], shape (H, W, 3)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such image file")
    try:
        if path.suffix.lower() == ".ppm":
            return _read_ppm(path)
        if _png_bit_depth(path) == 16:
            return _read_png16(path)
        with Image.open(path) as im:
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
                return np.repeat(arr[:, :, None], 3, axis=2)
            arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
            return arr
    except DataError:
        raise
    except Exception as exc:
        raise DataError(f"{path}: decode failed: {exc}") from exc


def load_mask(path) -> np.ndarray:
    """Decode a binary mask image; pixels brighter than mid-grey are in."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such mask file")
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L")) > 127
    except Exception as exc:
        raise DataError(f"{path}: mask decode failed: {exc}") from exc


def save_label_png(labels: np.ndarray, palette, path) -> None:
    """Write a label map as an 8-bit indexed PNG with the given palette
    (a sequence of (r, g, b) 8-bit triples, one per label index)."""
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"label map must be 2-D, got shape {labels.shape}")
    if labels.size and labels.max() >= len(palette):
        raise ValueError("label index exceeds palette size")
    im = Image.fromarray(labels.astype(np.uint8), mode="P")
    flat = [int(v) for rgb in palette for v in rgb]
    flat += [0] * (768 - len(flat))
    im.putpalette(flat)
    with atomic_path(path) as tmp:
        im.save(tmp, format="PNG")


def save_grey_png(values: np.ndarray, path) -> None:
    """Write values in [0, 1] as an 8-bit greyscale PNG (round(255 * v))."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"greyscale map must be 2-D, got shape {values.shape}")
    im = Image.fromarray(np.round(values * 255.0).astype(np.uint8), mode="L")
    with atomic_path(path) as tmp:
        im.save(tmp, format="PNG")


def save_rgb_png(rgb8: np.ndarray, path) -> None:
    """Write an (H, W, 3) uint8 array as an RGB PNG."""
    im = Image.fromarray(np.asarray(rgb8, dtype=np.uint8), mode="RGB")
    with atomic_path(path) as tmp:
        im.save(tmp, format="PNG")
