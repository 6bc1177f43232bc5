"""Hot loops with numba and pure-numpy implementations.

The numba path is used when numba imports cleanly; set NIGHTLIGHTS_NO_NUMBA=1
to force the numpy fallback.  Both paths are exported so the benchmark and the
equivalence tests can call them directly; everything else should go through
the dispatching names ``feature_map`` and ``count_true_neighbors``.

``work`` arrays handed to ``feature_map`` must already hold 0.0 at every cell
that must not contribute (nodata, sub-threshold, background), which keeps the
kernels free of masking logic.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env-flag subprocess test
    HAVE_NUMBA = False

_DISABLED = os.environ.get("NIGHTLIGHTS_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}
USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def feature_map_numpy(work: np.ndarray, radius: int) -> np.ndarray:
    """Inverse-square-distance window sum, one value per cell.

    out[p] = sum over in-window neighbours q of work[q] / d(p, q)^2, the
    center excluded, windows truncated at the borders.
    """
    work = np.ascontiguousarray(work, dtype=np.float64)
    nrows, ncols = work.shape
    out = np.zeros_like(work)
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if dr == 0 and dc == 0:
                continue
            w = 1.0 / (dr * dr + dc * dc)
            r0, r1 = max(0, -dr), nrows - max(0, dr)
            c0, c1 = max(0, -dc), ncols - max(0, dc)
            if r0 >= r1 or c0 >= c1:
                continue
            out[r0:r1, c0:c1] += w * work[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    return out


def count_true_neighbors_numpy(flags: np.ndarray) -> np.ndarray:
    """Count of True cells among the 8 neighbours of each cell."""
    f = np.ascontiguousarray(flags, dtype=bool).astype(np.int64)
    nrows, ncols = f.shape
    out = np.zeros((nrows, ncols), dtype=np.int64)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            r0, r1 = max(0, -dr), nrows - max(0, dr)
            c0, c1 = max(0, -dc), ncols - max(0, dc)
            if r0 >= r1 or c0 >= c1:
                continue
            out[r0:r1, c0:c1] += f[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    return out


if HAVE_NUMBA:
    from numba import njit, prange

    @njit(cache=True, parallel=True)
    def _feature_map_jit(work, radius):  # pragma: no cover - compiled
        nrows, ncols = work.shape
        out = np.zeros((nrows, ncols), dtype=np.float64)
        for r in prange(nrows):
            rlo = -radius if r >= radius else -r
            rhi = radius if r + radius < nrows else nrows - 1 - r
            for c in range(ncols):
                clo = -radius if c >= radius else -c
                chi = radius if c + radius < ncols else ncols - 1 - c
                acc = 0.0
                for dr in range(rlo, rhi + 1):
                    for dc in range(clo, chi + 1):
                        if dr == 0 and dc == 0:
                            continue
                        v = work[r + dr, c + dc]
                        if v != 0.0:
                            acc += v / (dr * dr + dc * dc)
                out[r, c] = acc
        return out

    @njit(cache=True, parallel=True)
    def _count_true_neighbors_jit(flags):  # pragma: no cover - compiled
        nrows, ncols = flags.shape
        out = np.zeros((nrows, ncols), dtype=np.int64)
        for r in prange(nrows):
            rlo = -1 if r >= 1 else 0
            rhi = 1 if r + 1 < nrows else 0
            for c in range(ncols):
                clo = -1 if c >= 1 else 0
                chi = 1 if c + 1 < ncols else 0
                n = 0
                for dr in range(rlo, rhi + 1):
                    for dc in range(clo, chi + 1):
                        if dr == 0 and dc == 0:
                            continue
                        if flags[r + dr, c + dc]:
                            n += 1
                out[r, c] = n
        return out

    def feature_map_numba(work: np.ndarray, radius: int) -> np.ndarray:
        return _feature_map_jit(np.ascontiguousarray(work, dtype=np.float64), int(radius))

    def count_true_neighbors_numba(flags: np.ndarray) -> np.ndarray:
        return _count_true_neighbors_jit(np.ascontiguousarray(flags, dtype=bool))

else:
    feature_map_numba = None
    count_true_neighbors_numba = None


if USE_NUMBA:
    feature_map = feature_map_numba
    count_true_neighbors = count_true_neighbors_numba
else:
    feature_map = feature_map_numpy
    count_true_neighbors = count_true_neighbors_numpy
