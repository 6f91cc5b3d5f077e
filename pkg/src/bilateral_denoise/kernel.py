"""Raised-cosine expansion of the Gaussian range kernel.

``cos(t / (sigma_r * sqrt(N)))**N`` expands binomially into ``N + 1`` complex
exponentials with weights ``C(N, n) / 2**N`` and frequencies
``(2n - N) / (sigma_r * sqrt(N))``. Dropping ``M`` terms from each tail of the
expansion trades accuracy for speed; the tails carry the smallest weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "ORDER_CONSTANT",
    "KernelApproximation",
    "minimal_order",
    "select_order",
    "accuracy_order",
    "raised_cosine",
    "binomial_weights",
    "cumulative_truncation",
    "chernoff_truncation",
    "build_approximation",
    "truncated_kernel",
    "gaussian_range_kernel",
]

ORDER_CONSTANT = 0.405
# regime thresholds and tolerances of the fast algorithm
MODERATE_ORDER = 40
LARGE_ORDER = 100
MODERATE_EPSILON = 0.01
LARGE_EPSILON = 0.1
_LOG_SPACE_ABOVE = 60


@dataclass(frozen=True)
class KernelApproximation:
    """Retained terms ``n = M .. N-M`` of the raised-cosine expansion.

    ``epsilon`` is ``None`` when nothing was truncated by rule (``M = 0`` regime).
    """

    N: int
    M: int
    coeffs: np.ndarray
    omegas: np.ndarray
    epsilon: Optional[float]
    sigma_r: float
    T: float

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.M, self.N - self.M + 1)

    @property
    def n_terms(self) -> int:
        return self.N - 2 * self.M + 1

    @property
    def retained_mass(self) -> float:
        return float(self.coeffs.sum())


def _check_sigma_r(sigma_r: float) -> None:
    if not sigma_r > 0:
        raise ValueError(f"sigma_r must be > 0, got {sigma_r}")


def minimal_order(T: float, sigma_r: float) -> float:
    """Smallest real order making the raised cosine positive and monotone on [-T, T]."""
    _check_sigma_r(sigma_r)
    return ORDER_CONSTANT * (T / sigma_r) ** 2


def select_order(T: float, sigma_r: float) -> int:
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    return max(1, math.ceil(minimal_order(T, sigma_r)))


def accuracy_order(T: float, sigma_r: float, tolerance: float, grid: int = 4001) -> int:
    """Smallest order whose raised cosine is within ``tolerance`` of the Gaussian on [-T, T].

    The search starts at :func:`select_order`, so the result also keeps the
    kernel positive and monotone. The deviation is measured on ``grid`` points
    of ``[0, T]`` (both kernels are even).
    """
    if not 0 < tolerance < 1:
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance}")
    N = select_order(T, sigma_r)
    u = np.linspace(0.0, T / sigma_r, grid)
    target = np.exp(-0.5 * u**2)
    while np.max(np.abs(np.cos(u / math.sqrt(N)) ** N - target)) > tolerance:
        N += 1
    return N


def raised_cosine(t, N: int, sigma_r: float):
    _check_sigma_r(sigma_r)
    return np.cos(np.asarray(t, dtype=np.float64) / (sigma_r * math.sqrt(N))) ** N


def gaussian_range_kernel(t, sigma_r: float):
    t = np.asarray(t, dtype=np.float64)
    return np.exp(-(t**2) / (2.0 * sigma_r**2))


def binomial_weights(N: int) -> np.ndarray:
    """``C(N, n) / 2**N`` for ``n = 0 .. N``.

    Computed in log space above ``N = 60``, where the integer coefficients
    outgrow 64 bits and direct float products lose digits.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N <= _LOG_SPACE_ABOVE:
        return np.array([math.comb(N, n) for n in range(N + 1)], dtype=np.float64) / 2.0**N
    half = np.array(
        [math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1) for k in range(N // 2 + 1)]
    )
    half = np.exp(half - N * math.log(2.0))
    # mirror so that c_n == c_{N-n} holds exactly
    return np.concatenate([half, half[: (N + 1) // 2][::-1]])


def cumulative_truncation(N: int, epsilon: float) -> int:
    """Largest ``M`` with ``c_M + ... + c_{N-M} > 1 - epsilon/2``."""
    c = binomial_weights(N)
    M = 0
    tail = 0.0  # c_0 + ... + c_{M-1}
    while M + 1 <= N - (M + 1):
        tail_next = tail + c[M]
        # retained mass for M+1 is 1 - 2 * tail_next by symmetry
        if 1.0 - 2.0 * tail_next > 1.0 - epsilon / 2.0:
            M += 1
            tail = tail_next
        else:
            break
    return M


def chernoff_truncation(N: int, epsilon: float) -> int:
    M = math.floor(0.5 * (N - math.sqrt(4.0 * N * math.log(2.0 / epsilon))))
    return min(max(M, 0), (N - 1) // 2)


def build_approximation(
    T: float,
    sigma_r: float,
    epsilon: Optional[float] = None,
    N: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> KernelApproximation:
    """Order, truncation and retained terms for a guide of dynamic range ``T``.

    Below order 40 every term is kept. From 40 to 99 the cumulative rule picks
    ``M`` with tolerance 0.01; from 100 on the Chernoff estimate with tolerance
    0.1 is used. ``epsilon`` overrides the tolerance of the two truncating
    regimes; ``N`` overrides the order.

    ``tolerance`` requests an accuracy target instead of the minimal order:
    ``N`` is raised to :func:`accuracy_order`, the truncation tolerance is
    capped at ``tolerance`` and ``M`` always comes from the exact cumulative
    rule (the Chernoff estimate only saves evaluating coefficients, which are
    computed here anyway, and keeps far more terms than needed). The retained
    sum then stays within ``1.5 * tolerance`` of the Gaussian on [-T, T].
    ``None`` keeps the minimal positive, monotone order and the rules above.
    """
    _check_sigma_r(sigma_r)
    if N is None:
        N = select_order(T, sigma_r)
        if tolerance is not None:
            N = max(N, accuracy_order(T, sigma_r, tolerance))
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    if epsilon is not None and not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")

    if N < MODERATE_ORDER:
        M, eps = 0, None
    elif N < LARGE_ORDER:
        eps = MODERATE_EPSILON if epsilon is None else epsilon
        if tolerance is not None:
            eps = min(eps, tolerance)
        M = cumulative_truncation(N, eps)
    else:
        eps = LARGE_EPSILON if epsilon is None else epsilon
        if tolerance is not None:
            eps = min(eps, tolerance)
            M = cumulative_truncation(N, eps)
        else:
            M = chernoff_truncation(N, eps)

    n = np.arange(M, N - M + 1)
    coeffs = binomial_weights(N)[M : N - M + 1]
    omegas = (2 * n - N) / (sigma_r * math.sqrt(N))
    return KernelApproximation(N, M, coeffs, omegas, eps, float(sigma_r), float(T))


def truncated_kernel(t, approx: KernelApproximation):
    """Real value of the retained expansion at ``t`` (imaginary parts cancel)."""
    t = np.asarray(t, dtype=np.float64)
    phase = np.multiply.outer(t, approx.omegas)
    return np.cos(phase) @ approx.coeffs
