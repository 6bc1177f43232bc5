"""Interannual intercalibration of uncalibrated DN rasters.

A pending image is tied to a reference image through samples drawn from
regions assumed stable over time.  The model is the power law

    corrected + 1 = a * (pending + 1) ** b

fitted as ordinary least squares on the log-log transform
ln(reference + 1) = ln(a) + b * ln(pending + 1).  The +1 offsets keep the
logs defined at DN 0.  Saturated cells are not excluded here; saturation is
its own correction step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, NightlightsError
from .raster import DNGrid
from .regression import fit_ols


@dataclass(frozen=True)
class PowerModel:
    """Coefficients of corrected + 1 = a * (dn + 1) ** b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise NightlightsError(f"power model requires a > 0, got {self.a}")


def fit_intercalibration(pairs) -> PowerModel:
    """Fit the power model to (pending, reference) DN pairs.

    ``pairs`` is an (n, 2) array-like.  Pending DN must be >= 0; reference DN
    must be > -1 (the log-transform domain; forward-modelled references can
    legitimately sit just below zero when a < 1).
    """
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise NightlightsError(f"pairs must be an (n, 2) array, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DegenerateDataError(f"intercalibration fit needs at least 2 pairs, got {arr.shape[0]}")
    m = arr[:, 0]
    c = arr[:, 1]
    if np.any(m < 0.0):
        raise NightlightsError("intercalibration fit: negative pending DN in pairs")
    if np.any(c <= -1.0):
        raise NightlightsError("intercalibration fit: reference DN <= -1 is outside the log domain")
    if np.unique(m).size < 2:
        raise DegenerateDataError("intercalibration fit: all pending DN identical, slope undefined")

    fit = fit_ols(np.log1p(m), np.log1p(c))
    return PowerModel(a=float(np.exp(fit.intercept)), b=fit.slope)


def apply_intercalibration(grid: DNGrid, model: PowerModel) -> DNGrid:
    """Map every valid cell through a * (v + 1) ** b - 1, clamped at 0.

    The clamp only engages when a < 1 (DN 0 would go slightly negative).
    Nodata cells pass through untouched.
    """
    valid = grid.valid
    v = grid.values
    if np.any(v[valid] < 0.0):
        raise NightlightsError("apply_intercalibration: grid has negative DN cells")
    out = v.copy()
    corrected = model.a * np.power(v[valid] + 1.0, model.b) - 1.0
    out[valid] = np.maximum(corrected, 0.0)
    return grid.replace_values(out)
