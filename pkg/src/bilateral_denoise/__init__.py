"""Bilateral denoising with a box-filtered range guide, plus a constant-time fast engine."""

from .bilateral import (
    DEFAULT_KERNEL_TOLERANCE,
    FilterParams,
    Variant,
    bilateral_direct,
    filter_improved,
    filter_iterated,
    filter_oracle,
    filter_standard,
    range_guide,
)
from .fast import KernelBreakdownError, fast_improved_bilateral, fast_improved_bilateral_literal
from .gaussian import Accuracy, GaussianSpec, gaussian_blur
from .image import ImageError, get_extended, map_pixels
from .kernel import KernelApproximation, build_approximation
from .metrics import MetricsReport, NoiseSpec, add_gaussian_noise, evaluate, mse, psnr, ssim
from .pgm import PgmError, load_pgm, read_pgm, save_pgm, write_pgm
from .prefilters import box_filter, local_dynamic_range, sliding_max, sliding_min

__all__ = [
    "DEFAULT_KERNEL_TOLERANCE",
    "FilterParams",
    "Variant",
    "bilateral_direct",
    "filter_improved",
    "filter_iterated",
    "filter_oracle",
    "filter_standard",
    "range_guide",
    "KernelBreakdownError",
    "fast_improved_bilateral",
    "fast_improved_bilateral_literal",
    "Accuracy",
    "GaussianSpec",
    "gaussian_blur",
    "ImageError",
    "get_extended",
    "map_pixels",
    "KernelApproximation",
    "build_approximation",
    "MetricsReport",
    "NoiseSpec",
    "add_gaussian_noise",
    "evaluate",
    "mse",
    "psnr",
    "ssim",
    "PgmError",
    "load_pgm",
    "read_pgm",
    "save_pgm",
    "write_pgm",
    "box_filter",
    "local_dynamic_range",
    "sliding_max",
    "sliding_min",
]

__version__ = "0.1.0"
