"""Raster conventions shared by every filter.

Images are plain 2-D ``numpy`` arrays of ``float64`` (rows x columns). Complex
planes used by the fast filter are ``complex128`` arrays of the same shape.
Reads outside the raster follow half-sample symmetric reflection, i.e. index
-1 maps to 0, -2 to 1 and ``width`` to ``width - 1``; the extension repeats with
period ``2 * width`` for arbitrarily distant coordinates.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "ImageError",
    "as_image",
    "as_complex_image",
    "reflect_index",
    "get_extended",
    "pad_reflect",
    "map_pixels",
]


class ImageError(ValueError):
    """Raised for malformed rasters or mismatched image pairs."""


def as_image(data, *, name: str = "image") -> np.ndarray:
    """Validate ``data`` and return it as a finite 2-D float64 array."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ImageError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ImageError(f"{name} contains NaN or Inf")
    return arr


def as_complex_image(data, *, name: str = "image") -> np.ndarray:
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ImageError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ImageError(f"{name} contains NaN or Inf")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "images") -> None:
    if a.shape != b.shape:
        raise ImageError(f"{what} differ in shape: {a.shape} vs {b.shape}")


def reflect_index(i: int, n: int) -> int:
    """Map an arbitrary integer index into ``[0, n)`` by symmetric reflection."""
    i %= 2 * n
    return 2 * n - 1 - i if i >= n else i


def get_extended(img: np.ndarray, x: int, y: int) -> float:
    """Pixel at column ``x``, row ``y``, reflecting out-of-range coordinates."""
    h, w = img.shape
    return float(img[reflect_index(y, h), reflect_index(x, w)])


def pad_reflect(img: np.ndarray, pad: int) -> np.ndarray:
    # numpy's "symmetric" mode is the half-sample reflection used everywhere here
    if pad == 0:
        return img
    return np.pad(img, pad, mode="symmetric")


def map_pixels(img: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` element-wise and return a new image of the same shape.

    ``f`` receives the whole array and must be vectorised (a numpy ufunc or an
    expression built from them). Non-finite results raise :class:`ImageError`.
    """
    img = as_image(img)
    out = np.asarray(f(img.copy()), dtype=np.float64)
    if out.shape != img.shape:
        out = np.broadcast_to(out, img.shape).copy()
    if not np.all(np.isfinite(out)):
        raise ImageError("pixel map produced non-finite values")
    return out
