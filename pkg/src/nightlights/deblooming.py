"""Blooming (overglow) correction.

Bright sources spill light into surrounding cells.  The spilled brightness at
a cell is modelled as a linear response to an inverse-square-distance sum over
its moving window:

    spill = a * sum(v_i / d_i^2) + b

The coefficients are fitted on pseudo light pixels: dim lit cells surrounded
by dark background, whose true emission is taken to be zero, so their observed
DN is pure spill.  The fitted response is then subtracted from every lit cell.

For both the fit and the subtraction the window sum runs over emitter cells
only, i.e. neighbours brighter than ``emitter_min_dn`` (default: the pseudo
pixel upper bound).  Dim cells are themselves mostly received spill; letting
them re-emit into the window sum double-counts the overglow, over-subtracts at
sources by more than their own value, and breaks the round trip against the
synthetic forward model.  The unrestricted per-cell sum remains available as
:func:`bloom_feature` / :func:`bloom_feature_map`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateDataError, NightlightsError
from .raster import DNGrid, PixelCoord, PixelMask, Window, require_same_shape, window_neighbors
from .regression import fit_ols

DEFAULT_BACKGROUND_MAX = 0.0
DEFAULT_PSEUDO_MAX_DN = 10.0
DEFAULT_MIN_BACKGROUND_NEIGHBORS = 5


@dataclass(frozen=True)
class PseudoPixelPolicy:
    """What counts as a pseudo light pixel.

    background_max: cells at or below this are dark background.
    pseudo_max_dn: lit cells above this are genuine sources, not pseudo.
    min_background_neighbors: how many of the 8 neighbours must be background
        (border cells only count neighbours that exist).
    """

    background_max: float = DEFAULT_BACKGROUND_MAX
    pseudo_max_dn: float = DEFAULT_PSEUDO_MAX_DN
    min_background_neighbors: int = DEFAULT_MIN_BACKGROUND_NEIGHBORS

    def __post_init__(self) -> None:
        if not self.pseudo_max_dn > self.background_max:
            raise NightlightsError(
                f"pseudo_max_dn ({self.pseudo_max_dn}) must exceed "
                f"background_max ({self.background_max})"
            )
        if not (1 <= self.min_background_neighbors <= 8):
            raise NightlightsError(
                f"min_background_neighbors must be in 1..8, got {self.min_background_neighbors}"
            )


@dataclass(frozen=True)
class BloomModel:
    """Coefficients of spill = a * window_sum + b at window radius ``radius``."""

    a: float
    b: float
    radius: int

    def __post_init__(self) -> None:
        if int(self.radius) != self.radius or self.radius < 1:
            raise NightlightsError(f"bloom radius must be an integer >= 1, got {self.radius!r}")
        object.__setattr__(self, "radius", int(self.radius))


def detect_pseudo_light(
    grid: DNGrid, policy: PseudoPixelPolicy = PseudoPixelPolicy()
) -> PixelMask:
    """Mask of pseudo light pixels under ``policy``.

    A cell qualifies when it is valid, background_max < DN <= pseudo_max_dn,
    and at least min_background_neighbors of its existing 8-neighbours are
    valid background cells.
    """
    valid = grid.valid
    v = grid.values
    background = valid & (v <= policy.background_max)
    counts = _kernels.count_true_neighbors(background)
    candidate = valid & (v > policy.background_max) & (v <= policy.pseudo_max_dn)
    return PixelMask(bits=candidate & (counts >= policy.min_background_neighbors))


def bloom_feature(grid: DNGrid, center: PixelCoord, radius: int) -> float:
    """Unrestricted inverse-square window sum at one cell.

    Reference implementation over :func:`window_neighbors`; the map variant
    below is the vectorised equivalent.
    """
    total = 0.0
    for _, value, dist in window_neighbors(grid, center, Window(radius)):
        total += value / (dist * dist)
    return total


def bloom_feature_map(
    grid: DNGrid, radius: int, emitter_min_dn: float | None = None
) -> np.ndarray:
    """Window sum for every cell at once.

    With ``emitter_min_dn`` set, only neighbours strictly above that DN
    contribute (the emitter-restricted sum used by fit/apply).  Nodata never
    contributes; background zeros drop out on their own.
    """
    if int(radius) != radius or radius < 1:
        raise NightlightsError(f"bloom radius must be an integer >= 1, got {radius!r}")
    work = np.where(grid.valid, grid.values, 0.0)
    if emitter_min_dn is not None:
        work = np.where(work > emitter_min_dn, work, 0.0)
    return _kernels.feature_map(work, int(radius))


def fit_bloom_model(
    grid: DNGrid,
    pseudo: PixelMask,
    radius: int,
    emitter_min_dn: float = DEFAULT_PSEUDO_MAX_DN,
) -> BloomModel:
    """OLS of observed pseudo-pixel DN on the emitter-restricted window sum."""
    require_same_shape(grid, pseudo, "bloom fit mask")
    selected = pseudo.bits & grid.valid
    n = int(np.count_nonzero(selected))
    if n < 2:
        raise DegenerateDataError(f"bloom fit needs at least 2 pseudo pixels, got {n}")
    features = bloom_feature_map(grid, radius, emitter_min_dn=emitter_min_dn)
    xs = features[selected]
    if np.unique(xs).size < 2:
        raise DegenerateDataError("bloom fit: window sums identical across pseudo pixels")
    fit = fit_ols(xs, grid.values[selected])
    return BloomModel(a=fit.slope, b=fit.intercept, radius=int(radius))


def apply_debloom(
    grid: DNGrid,
    model: BloomModel,
    emitter_min_dn: float = DEFAULT_PSEUDO_MAX_DN,
) -> DNGrid:
    """Subtract the fitted spill from every lit cell, clamped at zero.

    Window sums come from the input grid in one pass (corrections do not feed
    back into each other).  Background (DN <= 0) and nodata cells are
    untouched.
    """
    features = bloom_feature_map(grid, model.radius, emitter_min_dn=emitter_min_dn)
    lit = grid.valid & (grid.values > 0.0)
    out = grid.values.copy()
    out[lit] = np.maximum(grid.values[lit] - (model.a * features[lit] + model.b), 0.0)
    return grid.replace_values(out)
