"""Saturation correction for capped DN rasters.

Sensor DN tops out (typically at 63), flattening bright urban cores.  An
auxiliary radiance-calibrated raster of the same scene is not capped, so the
relation

    dn = a * ln(radiance) + b

can be fitted on unsaturated lit cells and then used to replace the values of
saturated cells.  Corrected values routinely exceed the cap; that is the
point of the correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, NightlightsError
from .raster import DNGrid, PixelMask, require_same_shape
from .regression import fit_ols

SATURATION_DN = 63.0


@dataclass(frozen=True)
class LogModel:
    """Coefficients of dn = a * ln(radiance) + b (natural log)."""

    a: float
    b: float


@dataclass(frozen=True)
class SampleSelectionPolicy:
    """Controls which unsaturated cells feed the log-model fit.

    max_abs_diff_quantile: after a provisional fit, keep the fraction of
        samples with the smallest absolute residual (1.0 keeps everything).
    min_radiance: cells with radiance below this never become samples; it
        also guards the log domain.
    """

    max_abs_diff_quantile: float = 1.0
    min_radiance: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.max_abs_diff_quantile <= 1.0):
            raise NightlightsError(
                f"max_abs_diff_quantile must be in (0, 1], got {self.max_abs_diff_quantile}"
            )
        if not self.min_radiance > 0.0:
            raise NightlightsError(f"min_radiance must be > 0, got {self.min_radiance}")


def detect_saturated(grid: DNGrid, threshold: float = SATURATION_DN) -> PixelMask:
    """Mask of valid cells with DN >= threshold (nodata is never saturated)."""
    return PixelMask(bits=grid.valid & (grid.values >= threshold))


def select_saturation_samples(
    ntl: DNGrid,
    radiance: DNGrid,
    saturated: PixelMask,
    policy: SampleSelectionPolicy = SampleSelectionPolicy(),
) -> np.ndarray:
    """(radiance, dn) sample pairs for the log-model fit.

    Candidates are cells that are lit (dn > 0), unsaturated, valid in both
    rasters, and at least min_radiance bright.  With a quantile below 1 a
    provisional fit trims the samples whose residuals sit above that
    quantile, which drops cells where the two products disagree (clouds,
    season, gas flares).  Returns an (n, 2) array in row-major cell order.
    """
    require_same_shape(ntl, radiance, "saturation sample grids")
    require_same_shape(ntl, saturated, "saturation mask")
    candidates = (
        ntl.valid
        & radiance.valid
        & ~saturated.bits
        & (ntl.values > 0.0)
        & (radiance.values >= policy.min_radiance)
    )
    samples = np.column_stack((radiance.values[candidates], ntl.values[candidates]))
    if samples.shape[0] < 2:
        raise DegenerateDataError(
            f"saturation sampling found {samples.shape[0]} usable cells, need at least 2"
        )
    if policy.max_abs_diff_quantile < 1.0:
        provisional = fit_saturation_model(samples)
        absres = np.abs(
            samples[:, 1] - (provisional.a * np.log(samples[:, 0]) + provisional.b)
        )
        cutoff = np.quantile(absres, policy.max_abs_diff_quantile)
        samples = samples[absres <= cutoff]
        if samples.shape[0] < 2:
            raise DegenerateDataError("residual trimming left fewer than 2 saturation samples")
    return samples


def fit_saturation_model(samples) -> LogModel:
    """OLS of dn on ln(radiance) over (radiance, dn) pairs."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise NightlightsError(f"samples must be an (n, 2) array, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DegenerateDataError(f"saturation fit needs at least 2 samples, got {arr.shape[0]}")
    radiance = arr[:, 0]
    dn = arr[:, 1]
    if np.any(radiance <= 0.0):
        raise NightlightsError("saturation fit: nonpositive radiance in samples")
    if np.unique(radiance).size < 2:
        raise DegenerateDataError("saturation fit: all radiance values identical, slope undefined")
    fit = fit_ols(np.log(radiance), dn)
    return LogModel(a=fit.slope, b=fit.intercept)


def apply_desaturation(
    ntl: DNGrid, radiance: DNGrid, saturated: PixelMask, model: LogModel
) -> DNGrid:
    """Replace saturated cells with max(0, a * ln(radiance) + b).

    Unsaturated cells come through bit-identical.  Every saturated valid cell
    must have positive, valid radiance; offenders are reported by coordinate.
    """
    require_same_shape(ntl, radiance, "desaturation grids")
    require_same_shape(ntl, saturated, "desaturation mask")
    target = saturated.bits & ntl.valid
    bad = target & (~radiance.valid | (radiance.values <= 0.0))
    if np.any(bad):
        rows, cols = np.nonzero(bad)
        where = ", ".join(f"({r},{c})" for r, c in list(zip(rows, cols))[:10])
        more = "" if rows.size <= 10 else f" and {rows.size - 10} more"
        raise NightlightsError(
            f"desaturation: saturated cells with unusable radiance at {where}{more}"
        )
    out = ntl.values.copy()
    out[target] = np.maximum(model.a * np.log(radiance.values[target]) + model.b, 0.0)
    return ntl.replace_values(out)
