"""Additive Gaussian noise and the MSE / PSNR / SSIM quality measures.

Noise variates come from ``numpy.random.default_rng(seed)`` (PCG64 bit
generator, ziggurat normal sampler), drawn in one call of shape
``(height, width)`` so the row-major ordering is fixed. PCG64 output and the
ziggurat tables are platform independent, so a given ``(image, sigma, seed)``
reproduces bit-identically everywhere numpy >= 1.17 runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .image import ImageError, as_image, check_same_shape

__all__ = [
    "NoiseSpec",
    "MetricsReport",
    "add_gaussian_noise",
    "mse",
    "psnr",
    "ssim",
    "ssim_window",
    "evaluate",
]

PEAK = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr_db: float
    ssim: float


def add_gaussian_noise(clean: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Return ``clean + sigma * n`` with i.i.d. standard normal ``n`` (unclamped)."""
    clean = as_image(clean, name="clean")
    if spec.sigma == 0:
        return clean.copy()
    rng = np.random.default_rng(int(spec.seed))
    return clean + spec.sigma * rng.standard_normal(clean.shape)


def mse(a: np.ndarray, b: np.ndarray) -> float:
    a, b = as_image(a), as_image(b)
    check_same_shape(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for 8-bit peak; ``inf`` for identical images."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / err)


def ssim_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised 1-D Gaussian taps; the 2-D window is their outer product."""
    x = np.arange(size) - (size - 1) / 2
    w = np.exp(-(x**2) / (2 * sigma**2))
    return w / w.sum()


def _valid_filter(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    half = len(taps) // 2
    out = correlate1d(img, taps, axis=0, mode="reflect")
    out = correlate1d(out, taps, axis=1, mode="reflect")
    # only windows lying fully inside the image are kept
    return out[half : img.shape[0] - half, half : img.shape[1] - half]


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity over all fully-contained 11x11 windows.

    Gaussian-weighted window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 255.
    """
    a, b = as_image(a), as_image(b)
    check_same_shape(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ImageError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}")
    taps = ssim_window()
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    mu_a = _valid_filter(a, taps)
    mu_b = _valid_filter(b, taps)
    var_a = _valid_filter(a * a, taps) - mu_a**2
    var_b = _valid_filter(b * b, taps) - mu_b**2
    cov = _valid_filter(a * b, taps) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def evaluate(estimate: np.ndarray, reference: np.ndarray) -> MetricsReport:
    return MetricsReport(mse(estimate, reference), psnr(estimate, reference), ssim(estimate, reference))
