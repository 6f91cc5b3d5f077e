"""Experiment runners behind the command-line harness.

Every runner is deterministic given its seed: noise comes from a seeded
generator and the direct filter involves no parallel reductions.
"""

from __future__ import annotations

import itertools
import statistics
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bilateral import FilterParams, Variant, bilateral_direct, range_guide
from .fast import fast_improved_bilateral
from .image import as_image
from .metrics import NoiseSpec, add_gaussian_noise, psnr, ssim

__all__ = [
    "SWEEP_L_SIGMA_S",
    "SWEEP_L_SIGMA_R",
    "BENCH_GRID",
    "TUNING_SIGMA_S",
    "TUNING_SIGMA_R",
    "denoise",
    "SweepLRow",
    "sweep_l",
    "BestCell",
    "best_over_grid",
    "sweep_sigma",
    "BenchRow",
    "bench",
]

SWEEP_L_SIGMA_S = 6.0
SWEEP_L_SIGMA_R = 20.0
# (sigma_s, sigma_r) pairs of the timing table
BENCH_GRID = ((2, 15), (4, 20), (3, 25), (5, 30), (3, 35), (4, 40))
TUNING_SIGMA_S = (2, 3, 4, 5)
TUNING_SIGMA_R = (10, 20, 30, 40, 50, 60)


def denoise(
    noisy: np.ndarray,
    p: FilterParams,
    engine: str = "direct",
    clean: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Dispatch to the direct filter of ``p.variant`` or to the fast improved filter."""
    if engine == "fast":
        if p.variant is not Variant.IMPROVED:
            raise ValueError(f"the fast engine supports the ibf variant only, got {p.variant.value}")
        return fast_improved_bilateral(noisy, p)
    if engine != "direct":
        raise ValueError(f"unknown engine {engine!r}")
    return bilateral_direct(noisy, range_guide(noisy, p, clean), p)


@dataclass(frozen=True)
class SweepLRow:
    L: int
    sigma: float
    psnr_db: float


def sweep_l(
    clean: np.ndarray,
    L_values: Sequence[int],
    sigmas: Sequence[float],
    seed: int,
    sigma_s: float = SWEEP_L_SIGMA_S,
    sigma_r: float = SWEEP_L_SIGMA_R,
    engine: str = "direct",
) -> list:
    """PSNR of the improved filter for every (L, noise level) pair.

    One noisy realisation per noise level is shared by all ``L``, so rows
    differ only in the box width.
    """
    if not L_values:
        raise ValueError("L list is empty")
    clean = as_image(clean)
    rows = []
    for sigma in sigmas:
        noisy = add_gaussian_noise(clean, NoiseSpec(sigma, seed))
        for L in L_values:
            p = FilterParams(sigma_s, sigma_r, L=L)
            rows.append(SweepLRow(L, float(sigma), psnr(denoise(noisy, p, engine), clean)))
    return rows


@dataclass(frozen=True)
class BestCell:
    variant: Variant
    sigma: float
    sigma_s: float
    sigma_r: float
    psnr_db: float
    ssim: float


def best_over_grid(
    noisy: np.ndarray,
    clean: np.ndarray,
    variant: Variant,
    sigma_s_values: Iterable[float] = TUNING_SIGMA_S,
    sigma_r_values: Iterable[float] = TUNING_SIGMA_R,
    L: int = 1,
    engine: str = "direct",
    sigma: float = float("nan"),
) -> BestCell:
    """Best PSNR of ``variant`` over a (sigma_s, sigma_r) grid; SSIM is reported at that cell."""
    best = None
    for s, r in itertools.product(sigma_s_values, sigma_r_values):
        p = FilterParams(s, r, L=L, variant=variant)
        out = denoise(noisy, p, engine, clean)
        score = psnr(out, clean)
        if best is None or score > best[0]:
            best = (score, s, r, out)
    if best is None:
        raise ValueError("tuning grid is empty")
    score, s, r, out = best
    return BestCell(variant, float(sigma), float(s), float(r), score, ssim(out, clean))


def sweep_sigma(
    clean: np.ndarray,
    sigmas: Sequence[float],
    seed: int,
    variants: Sequence[Variant] = (Variant.STANDARD, Variant.IMPROVED),
    L: int = 1,
    engine: str = "direct",
    sigma_s_values: Iterable[float] = TUNING_SIGMA_S,
    sigma_r_values: Iterable[float] = TUNING_SIGMA_R,
) -> list:
    """Per-variant best cells at each noise level, the layout of a PSNR/SSIM table."""
    clean = as_image(clean)
    sigma_s_values, sigma_r_values = tuple(sigma_s_values), tuple(sigma_r_values)
    rows = []
    for sigma in sigmas:
        noisy = add_gaussian_noise(clean, NoiseSpec(sigma, seed))
        for v in variants:
            eng = engine if v is Variant.IMPROVED else "direct"
            rows.append(best_over_grid(noisy, clean, v, sigma_s_values, sigma_r_values, L, eng, sigma))
    return rows


@dataclass(frozen=True)
class BenchRow:
    sigma_s: float
    sigma_r: float
    direct_seconds: float
    fast_seconds: float
    max_abs_diff: float

    @property
    def ratio(self) -> float:
        return self.fast_seconds / self.direct_seconds


def _median_time(fn: Callable[[], np.ndarray], repeats: int):
    times, out = [], None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def bench(
    noisy: np.ndarray,
    grid: Sequence = BENCH_GRID,
    repeats: int = 3,
    base: Optional[FilterParams] = None,
) -> list:
    """Median wall time of the direct and fast improved filters over ``grid``.

    Runs are sequential. The fast engine is compiled on a small crop first so
    compilation never lands in a timed run.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    noisy = as_image(noisy)
    base = base or FilterParams(1.0, 1.0)
    fast_improved_bilateral(noisy[:16, :16], replace(base, sigma_s=2.0, sigma_r=20.0, W=None))
    rows = []
    for s, r in grid:
        p = replace(base, sigma_s=float(s), sigma_r=float(r), W=None, variant=Variant.IMPROVED)
        td, direct = _median_time(lambda: denoise(noisy, p, "direct"), repeats)
        tf, fast = _median_time(lambda: denoise(noisy, p, "fast"), repeats)
        rows.append(BenchRow(float(s), float(r), td, tf, float(np.max(np.abs(fast - direct)))))
    return rows
