"""Hot numeric kernels with numba acceleration and numpy fallbacks.

The jitted implementations are used automatically when numba imports and the
environment variable SHEETLAB_NO_NUMBA is unset; either path returns bitwise
identical results.  `benchmarks/bench_kernels.py` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("SHEETLAB_NO_NUMBA", "") == ""
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        USE_NUMBA = False


def _count_occupied_np(codes: np.ndarray) -> int:
    """Number of distinct cell codes (non-negative int64)."""
    if len(codes) == 0:
        return 0
    return int(len(np.unique(codes)))


def _count_balls_np(values: np.ndarray, center: np.ndarray,
                    radii: np.ndarray) -> np.ndarray:
    """For each radius, how many rows of `values` lie within it of `center`
    in Euclidean norm."""
    dist = np.sqrt(np.sum((values - center[None, :]) ** 2, axis=1))
    return np.searchsorted(np.sort(dist), radii, side="right").astype(np.int64)


def _block_minmax_np(values: np.ndarray, block: int):
    """Per-block inclusive min and max of a square grid of (n*block+1)^2
    values; block boundaries are shared, so each block covers block+1 points
    per side."""
    n = (values.shape[0] - 1) // block

    def pool(v, reduce_blocks, combine):
        # along axis 0 then axis 1; inclusive of the trailing edge
        p = reduce_blocks(v[:-1].reshape(n, block, v.shape[1]), axis=1)
        p = combine(p, v[block::block])
        q = reduce_blocks(p[:, :-1].reshape(n, n, block), axis=2)
        return combine(q, p[:, block::block])

    return (pool(values, np.min, np.minimum),
            pool(values, np.max, np.maximum))


if USE_NUMBA:

    @njit(cache=True)
    def _count_occupied_nb(codes):
        if len(codes) == 0:
            return 0
        srt = np.sort(codes)
        count = 1
        for i in range(1, len(srt)):
            if srt[i] != srt[i - 1]:
                count += 1
        return count

    @njit(cache=True)
    def _count_balls_nb(values, center, radii):
        n, d = values.shape
        out = np.zeros(len(radii), dtype=np.int64)
        for i in range(n):
            acc = 0.0
            for j in range(d):
                diff = values[i, j] - center[j]
                acc += diff * diff
            dist = np.sqrt(acc)
            for k in range(len(radii)):
                if dist <= radii[k]:
                    out[k] += 1
        return out

    @njit(cache=True)
    def _block_minmax_nb(values, block):
        n = (values.shape[0] - 1) // block
        lo = np.empty((n, n))
        hi = np.empty((n, n))
        for bi in range(n):
            for bj in range(n):
                vmin = values[bi * block, bj * block]
                vmax = vmin
                for i in range(bi * block, (bi + 1) * block + 1):
                    for j in range(bj * block, (bj + 1) * block + 1):
                        v = values[i, j]
                        if v < vmin:
                            vmin = v
                        elif v > vmax:
                            vmax = v
                lo[bi, bj] = vmin
                hi[bi, bj] = vmax
        return lo, hi

    # numpy's C sort beats the jitted sort on large code arrays (see
    # benchmarks/bench_kernels.py), so count_occupied stays on numpy
    count_occupied = _count_occupied_np
    count_balls = _count_balls_nb
    block_minmax = _block_minmax_nb
else:
    count_occupied = _count_occupied_np
    count_balls = _count_balls_np
    block_minmax = _block_minmax_np
