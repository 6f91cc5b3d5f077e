"""Synthetic test images generated on demand (nothing binary ships with the package)."""

from __future__ import annotations

import numpy as np

__all__ = ["checkerboard", "gradient_edges", "bench_image", "FIXTURES", "make_fixture"]


def checkerboard(size: int = 150, square: int = 30, low: float = 0.0, high: float = 255.0) -> np.ndarray:
    """Black/white checkerboard; the default is a 150x150 board of 5x5 squares."""
    y, x = np.mgrid[:size, :size]
    return np.where((y // square + x // square) % 2 == 0, low, high).astype(np.float64)


def gradient_edges(size: int = 128) -> np.ndarray:
    """Horizontal ramp (40 to 215) overlaid with a bright disk and two flat rectangles."""
    y, x = np.mgrid[:size, :size].astype(np.float64)
    img = 40.0 + 175.0 * x / (size - 1)
    img[(x - 0.35 * size) ** 2 + (y - 0.35 * size) ** 2 < (0.18 * size) ** 2] = 235.0
    img[int(0.6 * size) : int(0.85 * size), int(0.5 * size) : int(0.9 * size)] = 20.0
    img[int(0.1 * size) : int(0.25 * size), int(0.6 * size) : int(0.9 * size)] = 128.0
    return img


def bench_image(size: int = 512) -> np.ndarray:
    """Timing fixture: the gradient scene at ``size`` with a fine checker inset."""
    img = gradient_edges(size)
    inset = checkerboard(size // 4, max(1, size // 32), 60.0, 190.0)
    o = size // 16
    img[size - o - inset.shape[0] : size - o, o : o + inset.shape[1]] = inset
    return img


FIXTURES = {
    "checkerboard": checkerboard,
    "gradient": gradient_edges,
    "bench": bench_image,
}


def make_fixture(name: str) -> np.ndarray:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
