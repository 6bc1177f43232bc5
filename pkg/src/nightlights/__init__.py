"""Nighttime-light raster corrections and sum-of-lights econometrics.

Three corrections make multi-year DN rasters comparable (interannual
intercalibration, saturation replacement, blooming removal); the corrected
sum of lights then feeds a simple annual GDP regression.  Synthetic forward
models mirror each correction so every fit can be tested as a round trip.
"""

from .deblooming import (
    BloomModel,
    PseudoPixelPolicy,
    apply_debloom,
    bloom_feature,
    bloom_feature_map,
    detect_pseudo_light,
    fit_bloom_model,
)
from .desaturation import (
    LogModel,
    SampleSelectionPolicy,
    apply_desaturation,
    detect_saturated,
    fit_saturation_model,
    select_saturation_samples,
)
from .econometrics import (
    AnnualSeries,
    EvaluationReport,
    GDPModel,
    align,
    evaluate,
    fit_gdp_model,
    index_to_base,
    predict_gdp,
    read_series,
    write_series,
)
from .errors import (
    DegenerateDataError,
    DimensionMismatchError,
    GridFormatError,
    NightlightsError,
)
from .intercalibration import PowerModel, apply_intercalibration, fit_intercalibration
from .raster import (
    DNGrid,
    PixelCoord,
    PixelMask,
    Window,
    extract_pairs,
    grid_from_text,
    grid_to_text,
    read_grid,
    read_mask,
    sum_of_lights,
    window_neighbors,
    write_grid,
    write_mask,
)
from .regression import LinearFit, fit_ols, mse
from .synth import (
    SceneSpec,
    add_noise,
    forward_bloom,
    forward_intercal,
    forward_saturate,
    gen_scene,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualSeries",
    "BloomModel",
    "DNGrid",
    "DegenerateDataError",
    "DimensionMismatchError",
    "EvaluationReport",
    "GDPModel",
    "GridFormatError",
    "LinearFit",
    "LogModel",
    "NightlightsError",
    "PixelCoord",
    "PixelMask",
    "PowerModel",
    "PseudoPixelPolicy",
    "SampleSelectionPolicy",
    "SceneSpec",
    "Window",
    "add_noise",
    "align",
    "apply_debloom",
    "apply_desaturation",
    "apply_intercalibration",
    "bloom_feature",
    "bloom_feature_map",
    "detect_pseudo_light",
    "detect_saturated",
    "evaluate",
    "extract_pairs",
    "fit_bloom_model",
    "fit_gdp_model",
    "fit_intercalibration",
    "fit_ols",
    "fit_saturation_model",
    "forward_bloom",
    "forward_intercal",
    "forward_saturate",
    "gen_scene",
    "grid_from_text",
    "grid_to_text",
    "index_to_base",
    "mse",
    "predict_gdp",
    "read_grid",
    "read_mask",
    "read_series",
    "select_saturation_samples",
    "sum_of_lights",
    "window_neighbors",
    "write_grid",
    "write_mask",
    "write_series",
]
