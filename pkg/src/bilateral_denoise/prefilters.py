"""Box prefilter (the range guide of the improved filter) and local dynamic range.

Both run in time independent of the window radius: the box filter uses
separable running sums, the dynamic range uses the van Herk / Gil-Werman
sliding max/min.
"""

from __future__ import annotations

import numpy as np

from .image import as_image, pad_reflect

__all__ = ["box_filter", "sliding_max", "sliding_min", "local_dynamic_range"]

# running sums restart after this many outputs to bound floating-point drift
_REACCUMULATE = 1 << 16


def _running_mean_axis(padded: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """Mean over ``2*radius + 1`` consecutive samples along ``axis``.

    ``padded`` carries ``radius`` extension samples at both ends of ``axis``.
    """
    x = np.moveaxis(padded, axis, -1)
    k = 2 * radius + 1
    n_out = x.shape[-1] - 2 * radius
    out = np.empty(x.shape[:-1] + (n_out,), dtype=np.float64)
    for start in range(0, n_out, _REACCUMULATE):
        stop = min(start + _REACCUMULATE, n_out)
        seg = x[..., start : stop + 2 * radius]
        csum = np.zeros(seg.shape[:-1] + (seg.shape[-1] + 1,))
        np.cumsum(seg, axis=-1, out=csum[..., 1:])
        out[..., start:stop] = (csum[..., k:] - csum[..., :-k]) / k
    return np.moveaxis(out, -1, axis)


def box_filter(img: np.ndarray, L: int) -> np.ndarray:
    """Mean over the ``(2L+1) x (2L+1)`` reflected neighbourhood of every pixel."""
    img = as_image(img)
    if L < 0:
        raise ValueError(f"box radius must be >= 0, got {L}")
    if L == 0:
        return img.copy()
    padded = pad_reflect(img, L)
    rows = _running_mean_axis(padded, L, axis=1)
    return _running_mean_axis(rows, L, axis=0)


def _vhgw(x: np.ndarray, radius: int, axis: int, op) -> np.ndarray:
    """van Herk / Gil-Werman sliding extremum of width ``2*radius+1`` along ``axis``.

    Three comparisons per sample regardless of the window width. ``x`` is
    already reflect-padded by ``radius`` on ``axis``.
    """
    x = np.moveaxis(x, axis, -1)
    k = 2 * radius + 1
    n = x.shape[-1]
    n_out = n - 2 * radius
    nblocks = -(-n // k)
    fill = -np.inf if op is np.maximum else np.inf
    buf = np.full(x.shape[:-1] + (nblocks * k,), fill)
    buf[..., :n] = x
    blocks = buf.reshape(x.shape[:-1] + (nblocks, k))
    prefix = op.accumulate(blocks, axis=-1).reshape(buf.shape)
    suffix = op.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1].reshape(buf.shape)
    # window [i, i+k-1] spans at most two blocks
    out = op(suffix[..., :n_out], prefix[..., k - 1 : k - 1 + n_out])
    return np.moveaxis(out, -1, axis)


def _sliding(img: np.ndarray, radius: int, op) -> np.ndarray:
    img = as_image(img)
    if radius < 0:
        raise ValueError(f"window radius must be >= 0, got {radius}")
    if radius == 0:
        return img.copy()
    padded = pad_reflect(img, radius)
    rows = _vhgw(padded, radius, axis=1, op=op)
    return _vhgw(rows, radius, axis=0, op=op)


def sliding_max(img: np.ndarray, radius: int) -> np.ndarray:
    return _sliding(img, radius, np.maximum)


def sliding_min(img: np.ndarray, radius: int) -> np.ndarray:
    return _sliding(img, radius, np.minimum)


def local_dynamic_range(guide: np.ndarray, W: int) -> float:
    """Largest max-minus-min of ``guide`` over any ``(2W+1)^2`` window.

    This bounds ``|guide(i-j) - guide(i)|`` for every pixel ``i`` and offset
    ``j`` in ``[-W, W]^2``, so a range kernel valid on ``[-T, T]`` covers every
    difference the bilateral filter can see.
    """
    if W < 1:
        raise ValueError(f"W must be >= 1, got {W}")
    guide = as_image(guide, name="guide")
    spread = sliding_max(guide, W) - sliding_min(guide, W)
    return float(spread.max())
